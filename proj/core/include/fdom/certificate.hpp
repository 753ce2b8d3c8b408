#pragma once

#include <string>
#include <vector>

#include "fdom/pipeline.hpp"

namespace fdom {

inline constexpr int kCertificateSchemaVersion = 1;

/// %.17g; NaN and infinities print as "nan", "inf", "-inf".
std::string format_double(double x);

/// FNV-1a 64-bit of the config text with the output directory cleared, as hex.
std::string inputs_digest(const PipelineConfig& config);

/// JSON certificate: every float with 17 significant digits, NaN as null.
/// No timestamps, so identical inputs give identical bytes.
std::string certificate_text(const PipelineResult& result);

/// face,e,normSq,H2,L2,H1,L1,ratio,degenerate,fxx,fxy,fyy,g1xx,g1xy,g1yy
std::string face_table(const PipelineResult& result);
/// vertex,kappa_g1,kappa_pullback,beta,w
std::string vertex_table(const PipelineResult& result);
/// word,l_rho,l_j,ratio (ratio empty when l_j <= tol)
std::string spectrum_table(const SpectrumTable& table);

struct VerifyResult {
  bool pass = false;
  std::string failure;  // first offending item
  int checks = 0;
  bool strict = false;  // certificate verdict, meaningful when pass
};

/// Re-checks a certificate against its dumped tables without solving again:
/// H/L identities and the minimum H gap from the face table, each eigenvalue
/// ratio and the bound ratio <= lambda^2, the strict and adsAdmissible
/// verdicts, the relator residual of j, and every spectrum row recomputed from
/// the generator matrices.
VerifyResult verify_certificate(const std::string& certificate, const std::string& faces_csv,
                                const std::string& spectrum_csv);

}  // namespace fdom
