#include "ossi/bloch.hpp"

#include <algorithm>
#include <cmath>

namespace ossi {

void SequenceParams::validate() const {
    if (!(tr_ms > 0)) throw InvalidParameter("tr_ms must be > 0");
    if (!(te_ms >= 0) || !(te_ms < tr_ms))
        throw InvalidParameter("te_ms must satisfy 0 <= te < tr");
    if (n_c < 1) throw InvalidParameter("n_c must be >= 1");
    if (!(flip_deg >= 0) || !(flip_deg <= 90))
        throw InvalidParameter("flip_deg must be in [0, 90]");
}

void Isochromat::validate() const {
    if (!(t2_ms > 0) || !(t1_ms >= t2_ms))
        throw InvalidParameter("relaxation must satisfy t1 >= t2 > 0");
}

double quadratic_phase(int64_t n, int n_c) {
    if (n_c < 1) throw InvalidParameter("quadratic_phase: n_c must be >= 1");
    if (n < 0) throw InvalidParameter("quadratic_phase: n must be >= 0");
    const int64_t m = 2 * int64_t(n_c);
    const int64_t r = n % m;
    return kPi * double((r * r) % m) / double(n_c);
}

namespace {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

Mat3 rot_z(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, -s, 0, s, c, 0, 0, 0, 1;
    return r;
}

Mat3 rot_y(double a) {
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return r;
}

// Free precession (phase convention e^{-i 2 pi f0 t}) plus relaxation over
// dt_ms; unit equilibrium magnetization.
void precess_relax(double dt_ms, double f0_hz, double t1_ms, double t2_ms,
                   Mat3 &lin, Vec3 &aff) {
    const double e1 = std::exp(-dt_ms / t1_ms);
    const double e2 = std::exp(-dt_ms / t2_ms);
    const double theta = -2.0 * kPi * f0_hz * dt_ms * 1e-3;
    lin = Mat3::Zero();
    const double c = std::cos(theta), s = std::sin(theta);
    lin(0, 0) = e2 * c;
    lin(0, 1) = -e2 * s;
    lin(1, 0) = e2 * s;
    lin(1, 1) = e2 * c;
    lin(2, 2) = e1;
    aff = Vec3(0, 0, 1 - e1);
}

struct TrStep {
    Mat3 to_sample;        // state -> state at the sample point
    Vec3 to_sample_aff;
    Mat3 full;             // state -> state at the next pulse
    Vec3 full_aff;
    double demod_re, demod_im; // e^{-i phi(n)} (+ psi_B timing correction)
};

// Builds the affine maps for TR index n. `phase` is the RF pulse phase,
// `f0` the precession frequency actually simulated, and `sample_phase_corr`
// an extra constant demodulation phase (used when psi_B is folded into f0).
TrStep make_step(const SequenceParams &seq, const Isochromat &iso, double phase,
                 double f0, double sample_phase_corr) {
    const double alpha = deg2rad(seq.flip_deg);
    const Mat3 pulse = rot_z(phase) * rot_y(alpha) * rot_z(-phase);

    Mat3 a_te, a_rest;
    Vec3 b_te, b_rest;
    precess_relax(seq.te_ms, f0, iso.t1_ms, iso.t2_ms, a_te, b_te);
    precess_relax(seq.tr_ms - seq.te_ms, f0, iso.t1_ms, iso.t2_ms, a_rest, b_rest);

    TrStep st;
    switch (seq.sample_time) {
    case SampleTime::at_te:
        st.to_sample = a_te * pulse;
        st.to_sample_aff = b_te;
        break;
    case SampleTime::post_rf:
        st.to_sample = pulse;
        st.to_sample_aff = Vec3::Zero();
        break;
    case SampleTime::pre_rf: {
        Mat3 a_tr;
        Vec3 b_tr;
        precess_relax(seq.tr_ms, f0, iso.t1_ms, iso.t2_ms, a_tr, b_tr);
        st.to_sample = a_tr * pulse;
        st.to_sample_aff = b_tr;
        break;
    }
    }
    st.full = a_rest * a_te * pulse;
    st.full_aff = a_rest * b_te + b_rest;
    if (seq.gradient_mode == GradientMode::spoiled) {
        // Ideal crusher: transverse magnetization destroyed before next pulse.
        st.full.row(0).setZero();
        st.full.row(1).setZero();
        st.full_aff(0) = st.full_aff(1) = 0;
    }
    const double demod = -phase + sample_phase_corr;
    st.demod_re = std::cos(demod);
    st.demod_im = std::sin(demod);
    return st;
}

double sample_offset_ms(const SequenceParams &seq) {
    switch (seq.sample_time) {
    case SampleTime::at_te: return seq.te_ms;
    case SampleTime::post_rf: return 0.0;
    case SampleTime::pre_rf: return seq.tr_ms;
    }
    return seq.te_ms;
}

cx demodulated_sample(const TrStep &st, const Vec3 &m) {
    const Vec3 ms = st.to_sample * m + st.to_sample_aff;
    return cx(ms(0), ms(1)) * cx(st.demod_re, st.demod_im);
}

// Periodic TR steps over one pattern period with psi_B folded into an
// effective off-resonance (exactly equivalent for the demodulated signal up
// to a constant sample-time phase that make_step absorbs).
std::vector<TrStep> periodic_steps(const SequenceParams &seq, const Isochromat &iso) {
    const int p = seq.period();
    const double psi_b = deg2rad(seq.psi_b_deg);
    const double f0_eff = iso.f0_hz + psi_b / (2.0 * kPi * seq.tr_ms * 1e-3);
    const double corr = psi_b * sample_offset_ms(seq) / seq.tr_ms;
    std::vector<TrStep> steps;
    steps.reserve(p);
    for (int n = 0; n < p; ++n)
        steps.push_back(make_step(seq, iso, quadratic_phase(n, seq.n_c), f0_eff, corr));
    return steps;
}

SignalCycle record_period(const SequenceParams &seq, const std::vector<TrStep> &steps,
                          Vec3 &m, const cx &m0, int keep) {
    SignalCycle cyc;
    cyc.sample_time = seq.sample_time;
    cyc.samples.resize(keep);
    for (size_t n = 0; n < steps.size(); ++n) {
        if (int(n) < keep) cyc.samples[n] = m0 * demodulated_sample(steps[n], m);
        m = steps[n].full * m + steps[n].full_aff;
    }
    return cyc;
}

} // namespace

SignalCycle steady_state_cycle(const SequenceParams &seq, const Isochromat &iso) {
    seq.validate();
    iso.validate();
    const auto steps = periodic_steps(seq, iso);
    Mat3 a = Mat3::Identity();
    Vec3 b = Vec3::Zero();
    for (const auto &st : steps) {
        b = st.full * b + st.full_aff;
        a = st.full * a;
    }
    const Mat3 sys = Mat3::Identity() - a;
    if (std::abs(sys.determinant()) < 1e-300)
        throw ConvergenceError("steady_state_cycle: degenerate period propagator", 1.0);
    Vec3 m = sys.partialPivLu().solve(b);
    return record_period(seq, steps, m, iso.m0, seq.n_c);
}

SignalCycle simulate_isochromat(const SequenceParams &seq, const Isochromat &iso,
                                int burn_in_t1_multiples, double conv_tol) {
    seq.validate();
    iso.validate();
    if (burn_in_t1_multiples < 5)
        throw InvalidParameter("burn-in must cover at least 5 T1");
    const int p = seq.period();
    const auto steps = periodic_steps(seq, iso);

    int64_t burn = int64_t(std::ceil(burn_in_t1_multiples * iso.t1_ms / seq.tr_ms));
    burn = ((burn + p - 1) / p) * p; // keep period alignment

    Vec3 m(0, 0, 1);
    for (int64_t n = 0; n < burn; ++n) {
        const auto &st = steps[size_t(n % p)];
        m = st.full * m + st.full_aff;
    }
    const SignalCycle first = record_period(seq, steps, m, iso.m0, p);
    Vec3 m_tail = m;
    const SignalCycle second = record_period(seq, steps, m_tail, iso.m0, p);

    double peak = 0.0, dev = 0.0;
    for (int k = 0; k < p; ++k) {
        peak = std::max(peak, std::abs(second.samples[k]));
        dev = std::max(dev, std::abs(second.samples[k] - first.samples[k]));
    }
    const double rel = peak > 0 ? dev / peak : dev;
    if (std::abs(iso.m0) > 0 && peak > 0 && rel > conv_tol)
        throw ConvergenceError("simulate_isochromat: steady state not reached", rel);

    SignalCycle cyc;
    cyc.sample_time = seq.sample_time;
    cyc.samples = second.samples.head(seq.n_c);
    return cyc;
}

cx spoiled_gre_signal(const SequenceParams &seq, const Isochromat &iso) {
    seq.validate();
    iso.validate();
    if (seq.gradient_mode != GradientMode::spoiled)
        throw InvalidParameter("spoiled_gre_signal requires spoiled gradient mode");
    const double e1 = std::exp(-seq.tr_ms / iso.t1_ms);
    const double alpha = deg2rad(seq.flip_deg);
    const double mag = std::sin(alpha) * (1 - e1) / (1 - e1 * std::cos(alpha)) *
                       std::exp(-seq.te_ms / iso.t2_ms);
    const double ph = -2.0 * kPi * iso.f0_hz * seq.te_ms * 1e-3;
    return iso.m0 * std::polar(mag, ph);
}

double ernst_angle_deg(double tr_ms, double t1_ms) {
    if (!(tr_ms > 0) || !(t1_ms > 0))
        throw InvalidParameter("ernst_angle: positive inputs required");
    return rad2deg(std::acos(std::exp(-tr_ms / t1_ms)));
}

std::vector<SignalCycle> frequency_response(const SequenceParams &seq,
                                            const std::vector<double> &f0_grid,
                                            const Isochromat &iso_base) {
    std::vector<SignalCycle> out(f0_grid.size());
    parallel_for(f0_grid.size(), [&](size_t b, size_t e) {
        for (size_t i = b; i < e; ++i) {
            Isochromat iso = iso_base;
            iso.f0_hz = f0_grid[i];
            out[i] = simulate_isochromat(seq, iso);
        }
    });
    return out;
}

double duality_max_rel_deviation(const SequenceParams &seq, const Isochromat &iso_base,
                                 int burn_in_t1_multiples) {
    seq.validate();
    const int nc = seq.n_c;
    const double delta = 1000.0 / (nc * seq.tr_ms); // 1/(n_c TR) in Hz
    const double ts = sample_offset_ms(seq) * 1e-3;
    Isochromat base = iso_base;
    const SignalCycle ref = simulate_isochromat(seq, base, burn_in_t1_multiples, 1e-9);
    double peak = 0.0;
    for (int k = 0; k < nc; ++k) peak = std::max(peak, std::abs(ref.samples[k]));
    double dev = 0.0;
    for (int j = 0; j < nc; ++j) {
        Isochromat iso = iso_base;
        iso.f0_hz = iso_base.f0_hz + j * delta;
        const SignalCycle shifted =
            simulate_isochromat(seq, iso, burn_in_t1_multiples, 1e-9);
        // A +1/(n_c TR) frequency shift advances the cycle by one TR, times
        // the constant within-TR dephasing picked up at the sample point.
        const cx wind = std::polar(1.0, 2.0 * kPi * j * delta * ts);
        for (int k = 0; k < nc; ++k) {
            const cx expect = ref.samples[(k + j) % nc];
            dev = std::max(dev, std::abs(shifted.samples[k] * wind - expect));
        }
    }
    return peak > 0 ? dev / peak : dev;
}

double phase_spread_deg(const SequenceParams &seq, const Isochromat &iso_center,
                        double span_hz, int count) {
    if (count < 2) throw InvalidParameter("phase_spread: need at least 2 isochromats");
    std::vector<SignalCycle> cycles(count);
    for (int i = 0; i < count; ++i) {
        Isochromat iso = iso_center;
        iso.f0_hz = iso_center.f0_hz - span_hz / 2 + span_hz * i / (count - 1);
        cycles[i] = steady_state_cycle(seq, iso);
    }
    const int nc = seq.n_c;
    int k_best = 0;
    double best_floor = -1.0;
    for (int k = 0; k < nc; ++k) {
        double floor_mag = 1e300;
        for (int i = 0; i < count; ++i)
            floor_mag = std::min(floor_mag, std::abs(cycles[i].samples[k]));
        if (floor_mag > best_floor) {
            best_floor = floor_mag;
            k_best = k;
        }
    }
    std::vector<double> ang(count);
    for (int i = 0; i < count; ++i) ang[i] = std::arg(cycles[i].samples[k_best]);
    std::sort(ang.begin(), ang.end());
    // circular range: 2*pi minus the largest gap between sorted angles
    double max_gap = 2 * kPi - (ang.back() - ang.front());
    for (int i = 1; i < count; ++i) max_gap = std::max(max_gap, ang[i] - ang[i - 1]);
    return rad2deg(2 * kPi - max_gap);
}

SteadyStateTable::SteadyStateTable(const SequenceParams &seq, double t1_ms,
                                   double t2_ms, int resolution)
    : n_c_(seq.n_c), res_(resolution), period_hz_(1000.0 / seq.tr_ms),
      t1_ms_(t1_ms), t2_ms_(t2_ms),
      sample_offset_s_(sample_offset_ms(seq) * 1e-3) {
    if (resolution < 16) throw InvalidParameter("SteadyStateTable: resolution too low");
    table_.resize(size_t(res_) * n_c_);
    parallel_for(size_t(res_), [&](size_t b, size_t e) {
        for (size_t m = b; m < e; ++m) {
            Isochromat iso;
            iso.t1_ms = t1_ms;
            iso.t2_ms = t2_ms;
            iso.f0_hz = period_hz_ * double(m) / res_;
            const SignalCycle cyc = steady_state_cycle(seq, iso);
            const cx unwind =
                std::polar(1.0, 2.0 * kPi * iso.f0_hz * sample_offset_s_);
            for (int k = 0; k < n_c_; ++k)
                table_[m * n_c_ + k] = unwind * cyc.samples[k];
        }
    });
}

void SteadyStateTable::cycle_at(double f0_hz, cx *out) const {
    double u = std::fmod(f0_hz, period_hz_);
    if (u < 0) u += period_hz_;
    const double x = u / period_hz_ * res_;
    int i1 = int(x);
    if (i1 >= res_) i1 = 0;
    const double t = x - i1;
    const int i0 = (i1 + res_ - 1) % res_;
    const int i2 = (i1 + 1) % res_;
    const int i3 = (i1 + 2) % res_;
    // Catmull-Rom weights
    const double w0 = 0.5 * (-t + 2 * t * t - t * t * t);
    const double w1 = 0.5 * (2 - 5 * t * t + 3 * t * t * t);
    const double w2 = 0.5 * (t + 4 * t * t - 3 * t * t * t);
    const double w3 = 0.5 * (-t * t + t * t * t);
    const cx *r0 = &table_[size_t(i0) * n_c_];
    const cx *r1 = &table_[size_t(i1) * n_c_];
    const cx *r2 = &table_[size_t(i2) * n_c_];
    const cx *r3 = &table_[size_t(i3) * n_c_];
    const cx rewind = std::polar(1.0, -2.0 * kPi * f0_hz * sample_offset_s_);
    for (int k = 0; k < n_c_; ++k)
        out[k] = rewind * (w0 * r0[k] + w1 * r1[k] + w2 * r2[k] + w3 * r3[k]);
}

Eigen::VectorXcd SteadyStateTable::cycle_at(double f0_hz) const {
    Eigen::VectorXcd v(n_c_);
    cycle_at(f0_hz, v.data());
    return v;
}

} // namespace ossi
