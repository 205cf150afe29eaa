#ifndef KPP_VERIFY_HPP
#define KPP_VERIFY_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kpp/kernels.hpp"
#include "kpp/model.hpp"
#include "kpp/waves.hpp"

namespace kpp::verify {

enum class Kind { Super, Sub };

/// Operator the candidate is checked against: the full parabolic operator
/// N(w) = w_t - chi w_xx - alpha w (1-w), or the linearized
/// M(w) = w_t - chi w_xx - (alpha - eps) w used by the pulled sub-solutions.
enum class OperatorTag { FullN, LinearM };

struct Piece {
    std::string name;
    std::function<bool(double t, double x)> contains;
    std::function<double(double t, double x)> value;
    std::function<double(double t, double x)> d_t;
    std::function<double(double t, double x)> d_x;
    std::function<double(double t, double x)> d_xx;
};

/// Moving interface x = speed * t + offset with the lemma's expected
/// one-sided derivative jump: -1 (super kink), +1 (sub kink), 0 (C^1 match).
struct Breakpoint {
    std::string name;
    double speed = 0.0;
    double offset = 0.0;
    int expected_jump_sign = 0;

    double position(double t) const { return speed * t + offset; }
};

struct ComparisonFunction {
    std::string name;
    Kind kind = Kind::Super;
    OperatorTag op = OperatorTag::FullN;
    double op_eps = 0.0; // eps of LinearM
    std::vector<Piece> pieces;
    std::vector<Breakpoint> breakpoints;

    // Every resolved constant of the construction, by name; exponent_keys
    // list the decay/oscillation rates eligible for mutation testing.
    std::map<std::string, double> constants;
    std::vector<std::string> exponent_keys;
    std::function<ComparisonFunction(const std::map<std::string, double>&)> rebuild;

    // When positive, the checker additionally verifies that the delta-scaled
    // candidate is a sub-solution of the full nonlinear operator.
    double delta_scale = 0.0;

    const Piece* find_piece(double t, double x) const;
    double eval(double t, double x) const;
};

struct JumpCheck {
    std::string breakpoint;
    bool satisfied = false;
    double worst_jump = 0.0; // jump value at the worst sampled time
    int expected_sign = 0;
};

struct SignReport {
    bool pass = false;
    bool vacuous = false; // zero samples: vacuous pass, flagged insufficient
    double worst_residual = 0.0;
    double worst_t = 0.0, worst_x = 0.0;
    long sample_count = 0;
    std::vector<JumpCheck> jump_checks;
    double continuity_worst = 0.0;      // max interface value mismatch
    double worst_scaled_residual = 0.0; // delta-scaled pass (NaN when unused)
};

struct CheckOptions {
    double t_lo = 0.0, t_hi = 50.0;
    int nt = 200;
    int nx_samples = 2000; // half clustered within 5 units of each interface
    double x_margin = 30.0;
    double tol = 1e-12;
    int jump_times = 24;
    kernels::Exec exec = kernels::Exec::OpenMP;
};

/// Samples the appropriate operator over a (t, x) grid covering every piece,
/// excluding the interfaces themselves, and checks the one-sided derivative
/// jumps. Verdict: residual signs within tol and all jump signs correct.
SignReport check(const ComparisonFunction& w, const Parameters& p, const ChiProfile& chi,
                 const CheckOptions& opts = {});

// --- general builders (any chi between d_- and d_+) ---

/// min{1, C e^{-(c_+/2d_+)(x - c_+ t)}}; super-solution for any C > 0.
ComparisonFunction build_general_super(const Parameters& p, double C);

/// Compactly supported two-arc cosine sub-solution moving at c < c_-.
ComparisonFunction build_general_sub(const Parameters& p, double c, double delta,
                                     double eps);

// --- Case I builders ---

/// min{1, e^{-(c_eps/2chi(tau))(x - c_eps t - tau)}} with c_eps = 2 sqrt((d_-+eps) alpha).
/// Pass tau = NaN to solve chi(tau) = d_- + 0.95 eps.
ComparisonFunction build_case1_super_slow(const Parameters& p, const ChiProfile& chi,
                                          double eps, double tau);

/// Cosine bump plus eps riding at speed c < min(c_+, c_het) in the chi ~ d_+ tail.
/// Pass tau = NaN for 1.05 times the computed threshold.
ComparisonFunction build_case1_sub_bump(const Parameters& p, const ChiProfile& chi,
                                        double c, double eps, double tau);

/// min{1, e^{-(c_het/2chi(tau))(x - c_het t - tau)}} for the locked regime.
/// Pass tau = NaN to solve chi(tau) just below c_het^2/(4 alpha).
ComparisonFunction build_case1_super_locked(const Parameters& p, const ChiProfile& chi,
                                            double tau);

// --- Case II builders ---

/// Three-piece anomalous-regime super-solution (1, lambda(c_u*) exponential,
/// time-damped mu = c_het/(2 d_+) exponential) moving at c in (c_u*, c_het).
ComparisonFunction build_case2_super_anomalous(const Parameters& p, const ChiProfile& chi,
                                               double c, double tau, double C);

/// Difference-of-exponentials sub-solution of the linear operator M, c in (c_-, c_u*).
ComparisonFunction build_case2_sub_pull(const Parameters& p, const ChiProfile& chi,
                                        double c, double eps, double tau);

/// The compactly supported glued sub-solution: the pulled difference profile up
/// to x - c_het t = -tau/2, continued by the cut-off eigenfunction phi.
ComparisonFunction build_case2_sub_full(const Parameters& p, const ChiProfile& chi,
                                        double c, double eps, double tau,
                                        const waves::PhiSolution& phi);

/// Three-piece super-solution for the detached regime c_het >= c_int, with the
/// mu_- = (c_het + sqrt(g(c_-)))/(2 d_+) tail.
ComparisonFunction build_case2_super_fast(const Parameters& p, const ChiProfile& chi,
                                          double tau);

/// Rightward-shifted cosine bump in the chi ~ d_+ tail, c_het < c < c_+.
ComparisonFunction build_case2_sub_cplus(const Parameters& p, const ChiProfile& chi,
                                         double c, double eps, double tau);

/// Supremum of admissible eps for the bump at speed c: the endpoint equation
/// must have a root and (K_eps + 1) eps <= alpha must hold.
double bump_max_eps(const Parameters& p, double c);

// --- mutation testing ---

struct MutationResult {
    std::string key;
    double factor = 1.0;
    bool flipped = false; // baseline passes, mutated candidate fails
};

/// Rebuilds the candidate with each exponent scaled by 1.1 and 0.9 and
/// re-runs the checker; flags which mutations flip the verdict.
std::vector<MutationResult> mutation_scan(const ComparisonFunction& w, const Parameters& p,
                                          const ChiProfile& chi, const CheckOptions& opts);

} // namespace kpp::verify

#endif
