#pragma once

#include "ggsc/eval.hpp"
#include "ggsc/ply.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <regex>

namespace ggsc::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kUsageError = 2 };

// Thrown for bad flag values and inconsistent flag combinations.
class UsageError : public Error {
public:
  using Error::Error;
};

//============================================================================
// Codec parameter settings shared by flags (--KEY VALUE) and sweep grids
// (--vary KEY=V1,V2,...).  Group keys precede the keys they cover so the
// specific key wins when both are given.

struct Setting {
  std::string key;
  std::string help;
  std::function<void(CodecParams&, const std::string&)> apply;
};

namespace detail {

  inline int to_int(const std::string& key, const std::string& v)
  {
    std::size_t used = 0;
    int out = 0;
    try {
      out = std::stoi(v, &used);
    }
    catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size())
      throw UsageError("--" + key + ": '" + v + "' is not an integer");
    return out;
  }

  inline double to_real(const std::string& key, const std::string& v)
  {
    std::size_t used = 0;
    double out = 0;
    try {
      out = std::stod(v, &used);
    }
    catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(out))
      throw UsageError("--" + key + ": '" + v + "' is not a number");
    return out;
  }

  inline std::string flag_suffix(AttributeKind k)
  {
    std::string s(attribute_name(k));
    std::replace(s.begin(), s.end(), '_', '-');
    return s;
  }

}  // namespace detail

inline const std::vector<Setting>&
settings()
{
  static const std::vector<Setting> table = [] {
    using detail::to_int;
    using detail::to_real;
    std::vector<Setting> t;
    t.push_back({"q-geo", "center quantization depth", [](CodecParams& p, const std::string& v) {
                   p.geometry_bits = to_int("q-geo", v);
                 }});
    t.push_back({"q-sh", "depth of all three SH channels", [](CodecParams& p, const std::string& v) {
                   for (auto k : {AttributeKind::sh_y, AttributeKind::sh_u, AttributeKind::sh_v})
                     p[k].bits = to_int("q-sh", v);
                 }});
    t.push_back(
      {"alpha-sh", "clipping ratio of all three SH channels", [](CodecParams& p, const std::string& v) {
         for (auto k : {AttributeKind::sh_y, AttributeKind::sh_u, AttributeKind::sh_v})
           p[k].alpha = to_real("alpha-sh", v);
       }});
    for (auto k : kAttributeKinds) {
      const auto qk = "q-" + detail::flag_suffix(k);
      const auto ak = "alpha-" + detail::flag_suffix(k);
      t.push_back({qk, std::string(attribute_name(k)) + " quantization depth",
                   [k, qk](CodecParams& p, const std::string& v) { p[k].bits = to_int(qk, v); }});
      t.push_back({ak, std::string(attribute_name(k)) + " clipping ratio",
                   [k, ak](CodecParams& p, const std::string& v) { p[k].alpha = to_real(ak, v); }});
    }
    t.push_back({"max-leaf", "largest kd-tree leaf", [](CodecParams& p, const std::string& v) {
                   int n = to_int("max-leaf", v);
                   if (n < 1)
                     throw UsageError("--max-leaf must be at least 1");
                   p.max_leaf = std::uint32_t(n);
                 }});
    t.push_back({"sigma-scope", "kernel width source: global|leaf",
                 [](CodecParams& p, const std::string& v) {
                   if (v == "global")
                     p.sigma_scope = SigmaScope::global;
                   else if (v == "leaf")
                     p.sigma_scope = SigmaScope::leaf;
                   else
                     throw UsageError("--sigma-scope must be 'global' or 'leaf'");
                 }});
    t.push_back({"scale-mode", "quantizer step sharing: group|component",
                 [](CodecParams& p, const std::string& v) {
                   if (v == "group")
                     p.scale_mode = ScaleMode::group;
                   else if (v == "component")
                     p.scale_mode = ScaleMode::component;
                   else
                     throw UsageError("--scale-mode must be 'group' or 'component'");
                 }});
    return t;
  }();
  return table;
}

inline const Setting&
find_setting(const std::string& key)
{
  for (const auto& s : settings())
    if (s.key == key)
      return s;
  throw UsageError("unknown parameter '" + key + "'");
}

inline std::string
default_text(const std::string& key)
{
  const CodecParams d;
  if (key == "q-geo")
    return std::to_string(d.geometry_bits);
  if (key == "max-leaf")
    return std::to_string(d.max_leaf);
  if (key == "sigma-scope")
    return "global";
  if (key == "scale-mode")
    return "group";
  for (auto k : kAttributeKinds) {
    if (key == "q-" + detail::flag_suffix(k))
      return std::to_string(d[k].bits);
    if (key == "alpha-" + detail::flag_suffix(k))
      return eval_detail::fmt(d[k].alpha);
  }
  if (key == "q-sh")
    return std::to_string(d[AttributeKind::sh_y].bits);
  if (key == "alpha-sh")
    return eval_detail::fmt(d[AttributeKind::sh_y].alpha);
  return {};
}

// Flags registered on one subcommand.  Values are applied after parsing in
// table order.
class ParamFlags {
public:
  void attach(CLI::App& app)
  {
    values_.resize(settings().size());
    for (std::size_t i = 0; i < settings().size(); ++i) {
      const auto& s = settings()[i];
      app.add_option("--" + s.key, values_[i], s.help + " (default " + default_text(s.key) + ")")
        ->group("Codec parameters");
    }
  }

  CodecParams params() const
  {
    CodecParams p;
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i])
        settings()[i].apply(p, *values_[i]);
    try {
      p.validate();
    }
    catch (const Error& e) {
      throw UsageError(e.what());
    }
    return p;
  }

private:
  std::vector<std::optional<std::string>> values_;
};

// Cartesian product of KEY=V1,V2,... specs; the first spec varies slowest.
inline std::vector<CodecParams>
expand_grid(const CodecParams& base, const std::vector<std::string>& specs)
{
  std::vector<CodecParams> grid{base};
  for (const auto& spec : specs) {
    auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size())
      throw UsageError("--vary expects KEY=V1,V2,... (got '" + spec + "')");
    const auto& setting = find_setting(spec.substr(0, eq));
    std::vector<std::string> values;
    std::stringstream ss(spec.substr(eq + 1));
    for (std::string v; std::getline(ss, v, ',');)
      values.push_back(v);
    std::vector<CodecParams> next;
    for (const auto& p : grid)
      for (const auto& v : values) {
        auto q = p;
        setting.apply(q, v);
        next.push_back(q);
      }
    grid = std::move(next);
  }
  // Invalid values surface as failed sweep rows, not usage errors.
  return grid;
}

//============================================================================

inline CodecOptions
codec_options(unsigned threads, const std::string& encodeCmd, const std::string& decodeCmd)
{
  CodecOptions o;
  o.threads = threads;
  auto pick = [](const std::string& flag, const char* env) {
    if (!flag.empty())
      return flag;
    const char* v = std::getenv(env);
    return std::string(v ? v : "");
  };
  ExternalGeometryCodec ext{
    pick(encodeCmd, "GGSC_EXTERNAL_GEOM_CMD"), pick(decodeCmd, "GGSC_EXTERNAL_GEOM_DECODE_CMD")};
  if (!ext.encode_command.empty() || !ext.decode_command.empty())
    o.external_geometry = ext;
  return o;
}

inline void
print_bitrate(std::ostream& out, const BitrateReport& r)
{
  out << "header_bytes: " << r.header_bytes << '\n' << "b1_bytes: " << r.b1_bytes << '\n';
  for (auto k : kAttributeKinds)
    out << "bytes_" << attribute_name(k) << ": " << r.attribute_bytes[std::size_t(k)] << '\n';
  out << "b2_bytes: " << r.b2_bytes << '\n' << "total_bytes: " << r.total_bytes << '\n';
}

inline void
print_info(std::ostream& out, const CodedStream& s, std::size_t fileBytes)
{
  const auto& h = s.header;
  out << "file_bytes: " << fileBytes << '\n'
      << "version: " << kStreamVersion << '\n'
      << "primitives: " << h.count << '\n'
      << "q_geo: " << h.geometry_bits << '\n'
      << "max_leaf: " << h.max_leaf << '\n'
      << "sigma_scope: " << (h.sigma_scope == SigmaScope::global ? "global" : "leaf") << '\n'
      << "scale_mode: " << (h.scale_mode == ScaleMode::group ? "group" : "component") << '\n'
      << "geometry_backend: "
      << (h.geometry_backend == GeometryBackend::internal ? "internal" : "external") << '\n';
  for (auto k : kAttributeKinds) {
    const auto& a = h.attributes[std::size_t(k)];
    out << "q_" << attribute_name(k) << ": " << a.bits << '\n'
        << "alpha_" << attribute_name(k) << ": " << eval_detail::fmt(a.alpha) << '\n';
  }
  print_bitrate(out, bitrate_breakdown(s));
}

// Parse "key: value" lines as printed by `info` and `encode`.
inline std::map<std::string, std::string>
parse_key_values(std::string_view text)
{
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    auto colon = line.find(": ");
    if (colon == std::string::npos)
      continue;
    kv[line.substr(0, colon)] = line.substr(colon + 2);
  }
  return kv;
}

//============================================================================

namespace detail {

  inline void encode_file(
    const std::filesystem::path& in,
    const std::filesystem::path& out,
    const CodecParams& params,
    const CodecOptions& options,
    std::ostream& log)
  {
    auto cloud = load_ply(read_file(in));
    auto stream = encode(cloud, params, options);
    auto bytes = stream.serialize();
    write_file(out, bytes);
    auto r = bitrate_breakdown(stream);
    if (r.total_bytes != bytes.size())
      throw Error("internal error: bitrate accounting does not match file size");
    log << "input: " << in.string() << '\n' << "output: " << out.string() << '\n'
        << "primitives: " << cloud.size() << '\n';
    print_bitrate(log, r);
  }

  inline void decode_file(
    const std::filesystem::path& in,
    const std::filesystem::path& out,
    const CodecOptions& options,
    std::ostream& log)
  {
    auto cloud = decode(ByteView(read_file(in)), options);
    write_file(out, save_ply(cloud));
    log << "input: " << in.string() << '\n' << "output: " << out.string() << '\n'
        << "primitives: " << cloud.size() << '\n';
  }

  // frame_NNNN.<ext> files of a directory, sorted by frame number.
  inline std::vector<std::pair<std::filesystem::path, std::string>> frames(
    const std::filesystem::path& dir, const std::string& ext)
  {
    if (!std::filesystem::is_directory(dir))
      throw Error("'" + dir.string() + "' is not a directory");
    const std::regex pattern("frame_([0-9]{4})\\." + ext);
    std::vector<std::pair<std::filesystem::path, std::string>> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      std::smatch m;
      const auto name = e.path().filename().string();
      if (e.is_regular_file() && std::regex_match(name, m, pattern))
        out.emplace_back(e.path(), m[1].str());
    }
    std::sort(out.begin(), out.end());
    if (out.empty())
      throw Error("no frame_NNNN." + ext + " files in '" + dir.string() + "'");
    return out;
  }

  inline void prepare_output_dir(const std::filesystem::path& dir)
  {
    std::filesystem::create_directories(dir);
  }

}  // namespace detail

// Entry point; args excludes the program name.
inline int
run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Graph-spectral compression of 3D Gaussian splatting scenes", "ggsc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ggsc 1.0.0");

  unsigned threads = 0;
  std::string extEncode, extDecode;
  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker threads (0 = all cores)");
  };
  auto addExternal = [&](CLI::App* sub) {
    sub->add_option(
      "--external-geom-cmd", extEncode,
      "external geometry encoder command with {in_ply} {out_bin} (env GGSC_EXTERNAL_GEOM_CMD)");
    sub->add_option(
      "--external-geom-decode-cmd", extDecode,
      "external geometry decoder command with {in_bin} {out_ply} "
      "(env GGSC_EXTERNAL_GEOM_DECODE_CMD)");
  };

  std::string input, output;
  bool batch = false;

  auto* enc = app.add_subcommand("encode", "PLY -> .ggsc");
  enc->add_option("input", input, "input PLY (or frame directory with --batch)")->required();
  enc->add_option("output", output, "output .ggsc (or directory with --batch)")->required();
  enc->add_flag("--batch", batch, "encode every frame_NNNN.ply of a directory");
  ParamFlags encFlags;
  encFlags.attach(*enc);
  addCommon(enc);
  addExternal(enc);

  auto* dec = app.add_subcommand("decode", ".ggsc -> PLY");
  dec->add_option("input", input, "input .ggsc (or frame directory with --batch)")->required();
  dec->add_option("output", output, "output PLY (or directory with --batch)")->required();
  dec->add_flag("--batch", batch, "decode every frame_NNNN.ggsc of a directory");
  addCommon(dec);
  addExternal(dec);

  auto* info = app.add_subcommand("info", "print header and section sizes");
  info->add_option("input", input, "input .ggsc")->required();

  std::vector<std::string> vary;
  auto* sweep = app.add_subcommand("sweep", "rate-distortion sweep -> CSV");
  sweep->add_option("input", input, "input PLY")->required();
  sweep->add_option("output", output, "output CSV ('-' for stdout)")->required();
  sweep->add_option("--vary", vary, "KEY=V1,V2,... (repeatable; cartesian product)");
  ParamFlags sweepFlags;
  sweepFlags.attach(*sweep);
  addCommon(sweep);
  addExternal(sweep);

  auto* corr = app.add_subcommand("correlate", "fit objective scores to MOS");
  corr->add_option("input", input, "CSV with header and two columns: objective,mos")->required();
  corr->add_option("output", output, "report CSV (printed when omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  }
  catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (enc->parsed()) {
      auto params = encFlags.params();
      auto options = codec_options(threads, extEncode, extDecode);
      if (!batch) {
        detail::encode_file(input, output, params, options, out);
        return kOk;
      }
      detail::prepare_output_dir(output);
      for (const auto& [path, id] : detail::frames(input, "ply"))
        detail::encode_file(
          path, std::filesystem::path(output) / ("frame_" + id + ".ggsc"), params, options, out);
      return kOk;
    }
    if (dec->parsed()) {
      auto options = codec_options(threads, extEncode, extDecode);
      if (!batch) {
        detail::decode_file(input, output, options, out);
        return kOk;
      }
      detail::prepare_output_dir(output);
      for (const auto& [path, id] : detail::frames(input, "ggsc"))
        detail::decode_file(
          path, std::filesystem::path(output) / ("frame_" + id + ".ply"), options, out);
      return kOk;
    }
    if (info->parsed()) {
      auto bytes = read_file(input);
      print_info(out, CodedStream::parse(bytes), bytes.size());
      return kOk;
    }
    if (sweep->parsed()) {
      auto grid = expand_grid(sweepFlags.params(), vary);
      auto cloud = load_ply(read_file(input));
      auto rows = rd_sweep(cloud, grid, codec_options(threads, extEncode, extDecode));
      auto csv = rd_csv(rows);
      if (output == "-")
        out << csv;
      else
        write_file(output, ByteView(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].ok)
          err << "warning: sweep row " << i << " failed: " << rows[i].error << '\n';
      return kOk;
    }
    if (corr->parsed()) {
      auto bytes = read_file(input);
      auto pairs = parse_score_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
      auto rep = fit_logistic5(pairs.objective, pairs.mos);
      out << "samples: " << pairs.objective.size() << '\n'
          << "plcc: " << eval_detail::fmt(rep.plcc) << '\n'
          << "srcc: " << eval_detail::fmt(rep.srcc) << '\n'
          << "rmse: " << eval_detail::fmt(rep.rmse) << '\n';
      for (std::size_t i = 0; i < 5; ++i)
        out << "beta" << i + 1 << ": " << eval_detail::fmt(rep.mapping.beta[i]) << '\n';
      auto csv = correlation_csv(rep);
      if (output.empty())
        out << '\n' << csv;
      else
        write_file(output, ByteView(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
      return kOk;
    }
  }
  catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }
  catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace ggsc::cli
