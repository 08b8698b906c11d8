#pragma once

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "cptp/lindblad.hpp"
#include "cptp/trajectory.hpp"

namespace cptp {

enum class Scheme { kEuler1, kEuler2, kLuCao1, kLuCao2, kQC1, kQC2, kRK4 };

inline constexpr Scheme kAllSchemes[] = {Scheme::kEuler1, Scheme::kEuler2, Scheme::kLuCao1,
                                         Scheme::kLuCao2, Scheme::kQC1,    Scheme::kQC2,
                                         Scheme::kRK4};

/// Lower-case short name: euler1, euler2, lucao1, lucao2, qc1, qc2, rk4.
std::string_view to_string(Scheme s);
/// Inverse of to_string; also accepts "lu-cao1", "qc-1" style spellings.
std::optional<Scheme> parse_scheme(std::string_view name);

/// Normalized Kraus operators M̃_j = M_j S^{-1/2} of a QC scheme; a CPTP map.
class KrausChannel {
 public:
  Eigen::Index dim() const { return dim_; }
  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }
  const std::vector<CMatrix>& kraus_ops() const { return ops_; }

  /// ‖Σ M̃†M̃ − Id‖_F
  double completeness_residual() const;

  /// S = Σ M†M before normalization, kept for inspection.
  const CMatrix& gram() const { return gram_; }

  /// Σ_j M̃_j ρ M̃_j†.
  CMatrix apply(const CMatrix& rho, OpCounter* counter = nullptr) const;

  /// Normalizes the raw operators M_j by S^{-1/2}, S = Σ M_j†M_j.
  KrausChannel(Scheme scheme, double dt, std::vector<CMatrix> raw);

 private:
  Eigen::Index dim_ = 0;
  double dt_ = 0.0;
  Scheme scheme_ = Scheme::kQC1;
  CMatrix gram_;
  std::vector<CMatrix> ops_;
  std::vector<Operand> left_;
  std::vector<Operand> right_;
};

/// Un-normalized Kraus family of a Lu–Cao scheme; completely positive, not
/// trace preserving. Normalization happens state by state.
class KrausFamily {
 public:
  Eigen::Index dim() const { return dim_; }
  double dt() const { return dt_; }
  Scheme scheme() const { return scheme_; }
  const std::vector<CMatrix>& kraus_ops() const { return ops_; }

  /// Σ_j M_j ρ M_j†, not normalized.
  CMatrix apply_unnormalized(const CMatrix& rho, OpCounter* counter = nullptr) const;

  KrausFamily(Scheme scheme, double dt, std::vector<CMatrix> ops);

 private:
  Eigen::Index dim_ = 0;
  double dt_ = 0.0;
  Scheme scheme_ = Scheme::kLuCao1;
  std::vector<CMatrix> ops_;
  std::vector<Operand> left_;
  std::vector<Operand> right_;
};

/// First-order channel: M_0 = Cayley(H)(Id − dt/2 Q), M_j = √dt L_j.
KrausChannel build_qc1(const LindbladModel& m, double dt);

/// Second-order channel with 1 + N_d + N_d² operators:
///   M_0 = Id + dtG + dt²/2 G²,
///   M_j = √dt (Id + dt/2 G) L_j (Id + dt/2 G),
///   M_ij = dt/√2 L_i L_j for every ordered pair.
KrausChannel build_qc2(const LindbladModel& m, double dt);

/// Order 1: M_0 = Id + dtG, M_j = √dt L_j. Order 2: the QC-2 list.
KrausFamily build_lucao(const LindbladModel& m, double dt, int order);

/// Σ_j M̃_j ρ M̃_j†. 2K products, K − 1 additions.
CMatrix apply_kraus(const KrausChannel& ch, const CMatrix& rho, OpCounter* counter = nullptr);
DensityMatrix apply_kraus(const KrausChannel& ch, const DensityMatrix& rho);

/// A(ρ)/tr A(ρ). Throws kDegenerateTrace if tr A(ρ) ≤ 1e-14.
CMatrix apply_lucao(const KrausFamily& f, const CMatrix& rho, OpCounter* counter = nullptr);
DensityMatrix apply_lucao(const KrausFamily& f, const DensityMatrix& rho);

/// ρ + dtL(ρ) (order 1) or ρ + dtL(ρ) + dt²/2 L(L(ρ)) (order 2).
CMatrix step_euler(const LindbladModel& m, double dt, int order, const CMatrix& rho,
                   OpCounter* counter = nullptr);

/// Classical four-stage Runge–Kutta on ρ' = L(ρ).
CMatrix step_rk4(const LindbladModel& m, double dt, const CMatrix& rho,
                 OpCounter* counter = nullptr);

/// One fixed-step integrator bound to a model and a step size. Kraus data is
/// built once at construction.
class Stepper {
 public:
  Stepper(Scheme scheme, LindbladModel model, double dt);

  Scheme scheme() const { return scheme_; }
  double dt() const { return dt_; }
  const LindbladModel& model() const { return model_; }
  bool has_precomputed() const { return !std::holds_alternative<std::monostate>(precomputed_); }
  const KrausChannel* channel() const { return std::get_if<KrausChannel>(&precomputed_); }
  const KrausFamily* family() const { return std::get_if<KrausFamily>(&precomputed_); }

  CMatrix step(const CMatrix& rho, OpCounter* counter = nullptr) const;

 private:
  Scheme scheme_;
  LindbladModel model_;
  double dt_;
  std::variant<std::monostate, KrausChannel, KrausFamily> precomputed_;
};

/// ‖ρ‖_F above which a run counts as diverged.
inline constexpr double kBlowupNorm = 1e6;

/// Runs n_steps steps, recording every record_every steps and the final
/// state. A diverging run stops early with blowup_flag set.
Trajectory integrate(const Stepper& s, const CMatrix& rho0, long n_steps, long record_every);

}  // namespace cptp
