// Isochromat-level steady-state simulation for oscillating (balanced,
// quadratic RF phase cycling) and spoiled-GRE sequences.
#pragma once

#include "ossi/core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ossi {

enum class GradientMode { balanced, spoiled };
enum class SampleTime { at_te, post_rf, pre_rf };

struct SequenceParams {
    double tr_ms = 15.0;
    double te_ms = 2.7;
    int n_c = 10;
    double flip_deg = 10.0;
    double psi_b_deg = 0.0;
    GradientMode gradient_mode = GradientMode::balanced;
    SampleTime sample_time = SampleTime::at_te;

    void validate() const;
    // RF phase pattern period in TRs: n_c for even n_c, 2*n_c otherwise.
    int period() const { return (n_c % 2 == 0) ? n_c : 2 * n_c; }
};

struct Isochromat {
    double t1_ms = 1433.2;
    double t2_ms = 92.6;
    double f0_hz = 0.0;
    cx m0 = cx(1.0, 0.0);

    void validate() const;
};

// One steady-state period of the demodulated signal for a single voxel or
// isochromat, sampled once per TR.
struct SignalCycle {
    Eigen::VectorXcd samples;
    SampleTime sample_time = SampleTime::at_te;
};

// pi*n^2/n_c reduced mod 2*pi. Exact integer reduction keeps large n stable.
double quadratic_phase(int64_t n, int n_c);

// Exact steady-state cycle via the affine fixed point of the period
// propagator. No burn-in; matches simulate_isochromat to the convergence
// tolerance of the latter.
SignalCycle steady_state_cycle(const SequenceParams &seq, const Isochromat &iso);

// Reference simulation: start from thermal equilibrium, run at least
// burn_in_t1_multiples * T1 of TRs, then record and verify period-to-period
// stability. Throws ConvergenceError (carrying the relative residual) if the
// recorded periods still differ by more than conv_tol.
SignalCycle simulate_isochromat(const SequenceParams &seq, const Isochromat &iso,
                                int burn_in_t1_multiples = 15,
                                double conv_tol = 1e-6);

// Analytic spoiled-GRE steady-state value at TE.
cx spoiled_gre_signal(const SequenceParams &seq, const Isochromat &iso);

double ernst_angle_deg(double tr_ms, double t1_ms);

// Steady-state cycles over an off-resonance grid; iso_base supplies T1/T2/m0.
std::vector<SignalCycle> frequency_response(const SequenceParams &seq,
                                            const std::vector<double> &f0_grid,
                                            const Isochromat &iso_base);

// Largest relative deviation in the time<->frequency duality. With the
// e^{-i 2 pi f0 t} precession convention used throughout,
//   M_T(k; f0) = M_F(f0 + (k - 1)/(n_c TR)) * e^{-i 2 pi (k-1)/(n_c TR) t_s},
// where M_F(f) is sample 1 of the steady-state cycle at off-resonance f and
// t_s is the within-TR sample offset. Checked on the 1/(n_c TR)-spaced grid
// around iso_base.f0_hz.
double duality_max_rel_deviation(const SequenceParams &seq,
                                 const Isochromat &iso_base,
                                 int burn_in_t1_multiples = 15);

// Angular spread of `count` isochromats evenly spanning span_hz around
// iso_center.f0_hz, in degrees, at the sequence's sample time. Evaluated at
// the fast-time index where the dimmest of the isochromats is brightest
// (the interval where all compared spins carry signal).
double phase_spread_deg(const SequenceParams &seq, const Isochromat &iso_center,
                        double span_hz, int count = 3);

// Frequency-periodic steady-state lookup table for one (sequence, T1, T2)
// tuple: cycles tabulated over one 1/TR period of f0 and interpolated with a
// Catmull-Rom spline. Reproduces steady_state_cycle to ~1e-10 relative and
// makes dictionary/phantom synthesis tractable.
class SteadyStateTable {
  public:
    SteadyStateTable(const SequenceParams &seq, double t1_ms, double t2_ms,
                     int resolution = 8192);
    // cycle for off-resonance f0 (Hz), unit m0
    void cycle_at(double f0_hz, cx *out) const;
    Eigen::VectorXcd cycle_at(double f0_hz) const;
    int n_c() const { return n_c_; }
    double t1_ms() const { return t1_ms_; }
    double t2_ms() const { return t2_ms_; }

  private:
    int n_c_ = 0;
    int res_ = 0;
    double period_hz_ = 0.0;
    double t1_ms_ = 0.0, t2_ms_ = 0.0;
    double sample_offset_s_ = 0.0;
    // De-wound cycles: table_[m * n_c + k] = cycle(f_m)[k] * e^{+i 2 pi f_m t_s},
    // which is exactly 1/TR-periodic in f0; lookups re-apply the winding.
    std::vector<cx> table_;
};

} // namespace ossi
