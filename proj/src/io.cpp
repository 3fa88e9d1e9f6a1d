#include "disco/io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace disco {

namespace fs = std::filesystem;
using nlohmann::json;

std::string hex_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%a", v);
  return buf;
}

double parse_hex_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw FormatError("bad hex float: '" + s + "'");
  return v;
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Pixel: return "pixel";
    case Provenance::Dilated: return "dilated";
    case Provenance::Optimized: return "optimized";
    case Provenance::Interpolated: return "interpolated";
  }
  return "?";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "pixel") return Provenance::Pixel;
  if (name == "dilated") return Provenance::Dilated;
  if (name == "optimized") return Provenance::Optimized;
  if (name == "interpolated") return Provenance::Interpolated;
  throw FormatError("unknown provenance '" + name + "'");
}

const char* interp_name(InterpMethod m) {
  switch (m) {
    case InterpMethod::Nearest: return "nearest";
    case InterpMethod::Bilinear: return "bilinear";
    case InterpMethod::Bicubic: return "bicubic";
  }
  return "?";
}

InterpMethod interp_from_name(const std::string& name) {
  if (name == "nearest") return InterpMethod::Nearest;
  if (name == "bilinear") return InterpMethod::Bilinear;
  if (name == "bicubic") return InterpMethod::Bicubic;
  throw FormatError("unknown interpolation '" + name + "'");
}

const char* boundary_name(Boundary b) {
  return b == Boundary::Circular ? "circular" : "zeropad";
}

Boundary boundary_from_name(const std::string& name) {
  if (name == "circular") return Boundary::Circular;
  if (name == "zeropad") return Boundary::ZeroPad;
  throw FormatError("unknown boundary '" + name + "'");
}

const char* method_name(SolveMethod m) {
  return m == SolveMethod::NormalEquations ? "ne" : "gd";
}

SolveMethod method_from_name(const std::string& name) {
  if (name == "ne") return SolveMethod::NormalEquations;
  if (name == "gd") return SolveMethod::GradientDescent;
  throw FormatError("unknown solve method '" + name + "'");
}

json basis_to_json(const BasisFile& file) {
  const MultiScaleBasis& basis = file.basis;
  const ScaleSet& set = basis.scale_set;
  json scales = json::array();
  for (const auto& e : set.entries) {
    scales.push_back({{"token", e.token.str()},
                      {"value", e.value},
                      {"integer_ratio", e.integer_ratio},
                      {"ratio_to_smallest", e.ratio_to_smallest},
                      {"kernel_size", e.kernel_size}});
  }
  json kernels = json::array();
  for (int j = 0; j < basis.num_functions; ++j) {
    json per_scale = json::array();
    for (int k = 0; k < set.count(); ++k) {
      const BasisSlot& slot = basis.slots[j][k];
      json hex = json::array(), dec = json::array();
      // row-major serialization of the (row, col) grid
      for (Index row = 0; row < slot.values.rows(); ++row) {
        for (Index col = 0; col < slot.values.cols(); ++col) {
          hex.push_back(hex_double(slot.values(row, col)));
          dec.push_back(slot.values(row, col));
        }
      }
      per_scale.push_back({{"provenance", provenance_name(slot.provenance)},
                           {"scale", slot.scale},
                           {"rows", slot.values.rows()},
                           {"cols", slot.values.cols()},
                           {"values_hex", std::move(hex)},
                           {"values", std::move(dec)}});
    }
    kernels.push_back(std::move(per_scale));
  }
  return json{{"version", file.version},
              {"scale_set",
               {{"step", set.step},
                {"step_token", set.step_token},
                {"smallest_kernel_size", set.smallest_kernel_size},
                {"scales", std::move(scales)}}},
              {"num_functions", basis.num_functions},
              {"solve_config",
               {{"seed", file.config.seed},
                {"num_samples", file.config.num_samples},
                {"sample_size", file.config.sample_size},
                {"method", method_name(file.config.method)},
                {"gd_steps", file.config.gd_steps},
                {"gd_rate", file.config.gd_rate},
                {"interp", interp_name(file.config.interp)},
                {"boundary", boundary_name(file.config.boundary)}}},
              {"kernels", std::move(kernels)}};
}

namespace {

const json& need(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw FormatError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

BasisFile basis_from_json(const json& doc) {
  try {
    BasisFile file;
    file.version = need(doc, "version").get<std::string>();
    if (file.version != "disco-basis/1")
      throw FormatError("unrecognized basis version '" + file.version + "'");

    const json& set_doc = need(doc, "scale_set");
    std::vector<ScaleToken> tokens;
    for (const auto& s : need(set_doc, "scales"))
      tokens.push_back(ScaleToken::parse(need(s, "token").get<std::string>()));
    const int w = need(set_doc, "smallest_kernel_size").get<int>();
    file.basis.scale_set = make_scale_set(tokens, w);
    for (size_t k = 0; k < tokens.size(); ++k) {
      const auto& entry = file.basis.scale_set.entries[k];
      const json& s = set_doc["scales"][k];
      if (entry.kernel_size != need(s, "kernel_size").get<int>() ||
          entry.integer_ratio != need(s, "integer_ratio").get<bool>())
        throw FormatError("scale entry disagrees with its token");
    }

    const json& cfg_doc = need(doc, "solve_config");
    file.config.seed = need(cfg_doc, "seed").get<std::uint64_t>();
    file.config.num_samples = need(cfg_doc, "num_samples").get<int>();
    file.config.sample_size = need(cfg_doc, "sample_size").get<int>();
    file.config.method = method_from_name(need(cfg_doc, "method").get<std::string>());
    file.config.gd_steps = need(cfg_doc, "gd_steps").get<int>();
    file.config.gd_rate = need(cfg_doc, "gd_rate").get<double>();
    file.config.interp = interp_from_name(need(cfg_doc, "interp").get<std::string>());
    file.config.boundary = boundary_from_name(need(cfg_doc, "boundary").get<std::string>());

    file.basis.num_functions = need(doc, "num_functions").get<int>();
    const int expect_j = w * w;
    if (file.basis.num_functions != expect_j)
      throw FormatError("num_functions does not match smallest kernel size");

    const json& kernels = need(doc, "kernels");
    if (static_cast<int>(kernels.size()) != file.basis.num_functions)
      throw FormatError("kernel array length mismatch (functions)");
    const int n_scales = file.basis.scale_set.count();
    file.basis.slots.assign(file.basis.num_functions, std::vector<BasisSlot>(n_scales));
    for (int j = 0; j < file.basis.num_functions; ++j) {
      const json& per_scale = kernels[j];
      if (static_cast<int>(per_scale.size()) != n_scales)
        throw FormatError("kernel array length mismatch (scales)");
      for (int k = 0; k < n_scales; ++k) {
        const json& slot_doc = per_scale[k];
        BasisSlot& slot = file.basis.slots[j][k];
        slot.provenance = provenance_from_name(need(slot_doc, "provenance").get<std::string>());
        slot.scale = need(slot_doc, "scale").get<double>();
        const auto rows = need(slot_doc, "rows").get<Index>();
        const auto cols = need(slot_doc, "cols").get<Index>();
        const json& hex = need(slot_doc, "values_hex");
        if (static_cast<Index>(hex.size()) != rows * cols)
          throw FormatError("kernel value array length mismatch");
        slot.values = Mat(rows, cols);
        Index i = 0;
        for (Index row = 0; row < rows; ++row)
          for (Index col = 0; col < cols; ++col)
            slot.values(row, col) = parse_hex_double(hex[i++].get<std::string>());
        if (!slot.values.allFinite()) throw FormatError("non-finite kernel value");
      }
    }
    return file;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed basis JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed basis JSON: ") + e.what());
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  fs::path tmp = dir / (path.filename().string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void save_basis(const fs::path& path, const BasisFile& file) {
  write_text_atomic(path, basis_to_json(file).dump(1) + "\n");
}

BasisFile load_basis(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read basis file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw FormatError(std::string("basis file is not valid JSON: ") + e.what());
  }
  return basis_from_json(doc);
}

bool validate_schema(const json& doc, const json& schema, std::string* error) {
  const auto fail = [&](const std::string& msg) {
    if (error) *error = msg;
    return false;
  };
  if (schema.contains("type")) {
    const std::string type = schema["type"].get<std::string>();
    const bool ok = (type == "object" && doc.is_object()) || (type == "array" && doc.is_array()) ||
                    (type == "string" && doc.is_string()) ||
                    (type == "number" && doc.is_number()) ||
                    (type == "integer" && doc.is_number_integer()) ||
                    (type == "boolean" && doc.is_boolean());
    if (!ok) return fail("expected " + type + ", got " + std::string(doc.type_name()));
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"]) found = found || v == doc;
    if (!found) return fail("value not in enum: " + doc.dump());
  }
  if (schema.contains("minimum") && doc.is_number()) {
    if (doc.get<double>() < schema["minimum"].get<double>())
      return fail("value below minimum: " + doc.dump());
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!doc.contains(key.get<std::string>()))
        return fail("missing required field '" + key.get<std::string>() + "'");
    }
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (!doc.contains(key)) continue;
      std::string suberr;
      if (!validate_schema(doc[key], sub, &suberr)) return fail(key + ": " + suberr);
    }
  }
  if (schema.contains("items") && doc.is_array()) {
    for (size_t i = 0; i < doc.size(); ++i) {
      std::string suberr;
      if (!validate_schema(doc[i], schema["items"], &suberr))
        return fail("[" + std::to_string(i) + "]: " + suberr);
    }
  }
  return true;
}

json lemma_report_json(Index n_in, Index n_out, InterpMethod interp, std::uint64_t seed,
                       const std::vector<ConstraintResidual>& trials) {
  std::vector<double> residuals;
  residuals.reserve(trials.size());
  for (const auto& t : trials) residuals.push_back(t.residual);
  std::vector<double> sorted = residuals;
  std::sort(sorted.begin(), sorted.end());
  const double median =
      sorted.empty() ? 0.0
                     : (sorted.size() % 2 ? sorted[sorted.size() / 2]
                                          : 0.5 * (sorted[sorted.size() / 2 - 1] +
                                                   sorted[sorted.size() / 2]));
  return json{{"kind", "lemma"},
              {"n_in", n_in},
              {"n_out", n_out},
              {"factor", static_cast<double>(n_in) / n_out},
              {"integer_factor", n_out != 0 && n_in % n_out == 0},
              {"interp", interp_name(interp)},
              {"seed", seed},
              {"trials", residuals.size()},
              {"residuals", residuals},
              {"min_residual", sorted.empty() ? 0.0 : sorted.front()},
              {"median_residual", median},
              {"max_residual", sorted.empty() ? 0.0 : sorted.back()}};
}

json verify_report_json(const std::string& basis_path, const std::vector<PairResidual>& pairs,
                        double threshold, int num_samples, std::uint64_t seed) {
  json out{{"kind", "basis-verify"},
           {"basis", basis_path},
           {"threshold", threshold},
           {"num_samples", num_samples},
           {"seed", seed},
           {"pairs", json::array()}};
  bool pass = true;
  for (const auto& p : pairs) {
    if (p.integer_ratio && p.max_residual >= threshold) pass = false;
    out["pairs"].push_back({{"low", p.low},
                            {"high", p.high},
                            {"ratio", p.ratio},
                            {"integer_ratio", p.integer_ratio},
                            {"max_residual", p.max_residual},
                            {"mean_residual", p.mean_residual}});
  }
  out["pass"] = pass;
  return out;
}

json equivariance_report_json(const EquivarianceReport& report, const ScaleSet& scale_set,
                              InterpMethod interp, int num_inputs, std::uint64_t seed) {
  json scales = json::array();
  for (const auto& e : scale_set.entries) scales.push_back(e.value);
  json terms = json::array();
  for (const auto& t : report.per_index) {
    terms.push_back({{"s_index", t.s_index},
                     {"mean_rel_error", t.mean_rel_error},
                     {"valid_from", t.valid_from},
                     {"num_inputs", t.num_inputs},
                     {"excluded_inputs", t.excluded_inputs}});
  }
  return json{{"kind", "equivariance"}, {"delta", report.delta}, {"per_index", terms},
              {"scales", scales},       {"interp", interp_name(interp)},
              {"num_inputs", num_inputs}, {"seed", seed}};
}

json bench_report_json(const ComplexityProfile& p) {
  return json{{"kind", "bench"},
              {"num_scales", p.num_scales},
              {"step", p.step},
              {"smallest_size", p.smallest_size},
              {"spatial", p.spatial},
              {"repeats", p.repeats},
              {"analytic_dense_macs", p.analytic_dense_macs},
              {"analytic_sparse_macs", p.analytic_sparse_macs},
              {"analytic_speedup", p.analytic_speedup},
              {"discrete_dense_macs", p.discrete_dense_macs},
              {"discrete_sparse_macs", p.discrete_sparse_macs},
              {"dense_ms", p.dense_ms},
              {"sparse_ms", p.sparse_ms},
              {"measured_speedup", p.measured_speedup}};
}

namespace {

Mat load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") throw FormatError(path.string() + ": not a PGM file");
  const auto next_int = [&in, &path]() {
    // skip whitespace and '#' comment lines
    while (true) {
      const int c = in.peek();
      if (c == '#') {
        std::string line;
        std::getline(in, line);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = -1;
    in >> v;
    if (!in || v < 0) throw FormatError(path.string() + ": truncated PGM header");
    return v;
  };
  const long w = next_int(), h = next_int(), maxval = next_int();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw FormatError(path.string() + ": bad PGM dimensions");
  Mat img(h, w);
  if (magic == "P2") {
    for (long y = 0; y < h; ++y)
      for (long x = 0; x < w; ++x) img(y, x) = next_int() / static_cast<double>(maxval);
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> row(static_cast<size_t>(w) * bytes);
    for (long y = 0; y < h; ++y) {
      in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
      if (!in) throw FormatError(path.string() + ": truncated PGM data");
      for (long x = 0; x < w; ++x) {
        const unsigned v = bytes == 1 ? row[x] : (row[2 * x] << 8 | row[2 * x + 1]);
        img(y, x) = v / static_cast<double>(maxval);
      }
    }
  }
  return img;
}

Mat load_png(const fs::path& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw FormatError("cannot read " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw FormatError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw FormatError(path.string() + ": PNG decode failed");
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_read_update_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const png_byte channels = png_get_channels(png, info);
  std::vector<std::vector<png_byte>> rows(h, std::vector<png_byte>(png_get_rowbytes(png, info)));
  std::vector<png_bytep> row_ptrs(h);
  for (png_uint_32 y = 0; y < h; ++y) row_ptrs[y] = rows[y].data();
  png_read_image(png, row_ptrs.data());
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);

  Mat img(h, w);
  for (png_uint_32 y = 0; y < h; ++y) {
    for (png_uint_32 x = 0; x < w; ++x) {
      double v;
      if (channels >= 3) {
        const png_byte* px = &rows[y][static_cast<size_t>(x) * channels];
        v = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) / 255.0;
      } else {
        v = rows[y][static_cast<size_t>(x) * channels] / 255.0;
      }
      img(y, x) = v;
    }
  }
  return img;
}

}  // namespace

Mat load_grayscale(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".pgm" || ext == ".PGM") return load_pgm(path);
  if (ext == ".png" || ext == ".PNG") return load_png(path);
  throw FormatError(path.string() + ": unsupported image type (PGM/PNG accepted)");
}

std::vector<Mat> load_image_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (ext == ".pgm" || ext == ".PGM" || ext == ".png" || ext == ".PNG")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Mat> out;
  for (const auto& f : files) out.push_back(load_grayscale(f));
  if (out.empty()) throw FormatError(dir.string() + ": no PGM/PNG images found");
  return out;
}

}  // namespace disco
