#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "disco/basis.hpp"
#include "disco/complexity.hpp"
#include "disco/scaleconv.hpp"
#include "disco/spectral.hpp"

namespace disco {

/// Malformed input files and reports (maps to CLI exit code 2).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lossless round-trip encoding of doubles ("%a" hex-float form).
std::string hex_double(double v);
double parse_hex_double(const std::string& s);

/// On-disk basis container: versioned JSON with hex-float kernel values
/// (decimal duplicates included for readability) and the solve-config echo.
struct BasisFile {
  std::string version = "disco-basis/1";
  MultiScaleBasis basis;
  SolveConfig config;
};

nlohmann::json basis_to_json(const BasisFile& file);
BasisFile basis_from_json(const nlohmann::json& doc);

void save_basis(const std::filesystem::path& path, const BasisFile& file);
BasisFile load_basis(const std::filesystem::path& path);

/// Writes via temp file + rename in the target directory.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

/// Structural JSON-schema subset: type / properties / required / items / enum
/// / minimum. Returns false and fills *error on the first violation.
bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema, std::string* error);

// Report documents emitted by the CLI (schemas shipped under docs/schemas).
nlohmann::json lemma_report_json(Index n_in, Index n_out, InterpMethod interp, std::uint64_t seed,
                                 const std::vector<ConstraintResidual>& trials);
nlohmann::json verify_report_json(const std::string& basis_path,
                                  const std::vector<PairResidual>& pairs, double threshold,
                                  int num_samples, std::uint64_t seed);
nlohmann::json equivariance_report_json(const EquivarianceReport& report,
                                        const ScaleSet& scale_set, InterpMethod interp,
                                        int num_inputs, std::uint64_t seed);
nlohmann::json bench_report_json(const ComplexityProfile& profile);

/// Grayscale image loading: PGM (P2/P5) and PNG (RGB collapses to luma),
/// normalized to [0, 1].
Mat load_grayscale(const std::filesystem::path& path);
std::vector<Mat> load_image_dir(const std::filesystem::path& dir);

const char* provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);
const char* interp_name(InterpMethod m);
InterpMethod interp_from_name(const std::string& name);
const char* boundary_name(Boundary b);
Boundary boundary_from_name(const std::string& name);
const char* method_name(SolveMethod m);
SolveMethod method_from_name(const std::string& name);

}  // namespace disco
