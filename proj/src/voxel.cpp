#include "ossi/voxel.hpp"

#include <cmath>

namespace ossi {

void VoxelParams::validate() const {
    if (!(t2p_ms > 0)) throw InvalidParameter("t2p_ms must be > 0");
    if (!(t2_ms > 0) || !(t1_ms >= t2_ms))
        throw InvalidParameter("relaxation must satisfy t1 >= t2 > 0");
}

void IntegrationGrid::validate() const {
    if (n_iso < 2) throw InvalidParameter("integration grid needs >= 2 isochromats");
    if (!(f_min_hz < f_max_hz)) throw InvalidParameter("f_min must be < f_max");
}

void FmriProtocol::validate() const {
    if (task.empty()) throw InvalidParameter("protocol task must be non-empty");
    if (!(frame_period_s > 0)) throw InvalidParameter("frame_period_s must be > 0");
    if (!std::isfinite(target_tsnr_db))
        throw InvalidParameter("target_tsnr_db must be finite");
    if (!(resp_period_s > 0)) throw InvalidParameter("resp_period_s must be > 0");
}

double cauchy_pdf(double f_hz, double t2p_ms) {
    if (!(t2p_ms > 0)) throw InvalidParameter("cauchy_pdf: t2p must be > 0");
    const double gamma = 1.0 / (2.0 * kPi * t2p_ms * 1e-3);
    return gamma / (kPi * (gamma * gamma + f_hz * f_hz));
}

void cauchy_weights(const IntegrationGrid &grid, double t2p_ms,
                    std::vector<double> &freqs, std::vector<double> &weights) {
    grid.validate();
    const int n = grid.n_iso;
    freqs.resize(n);
    weights.resize(n);
    const double df = (grid.f_max_hz - grid.f_min_hz) / (n - 1);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        freqs[i] = grid.f_min_hz + df * i;
        weights[i] = cauchy_pdf(freqs[i], t2p_ms) * df;
        sum += weights[i];
    }
    // Renormalize over the truncated support so m0 stays unbiased.
    for (double &w : weights) w /= sum;
}

namespace {

template <typename CycleAt>
SignalCycle weighted_cycle(const SequenceParams &seq, const VoxelParams &voxel,
                           const IntegrationGrid &grid, double t2p_ms,
                           const CycleAt &cycle_at) {
    std::vector<double> freqs, weights;
    cauchy_weights(grid, t2p_ms, freqs, weights);
    SignalCycle out;
    out.sample_time = seq.sample_time;
    out.samples = Eigen::VectorXcd::Zero(seq.n_c);
    std::vector<cx> buf(seq.n_c);
    for (size_t i = 0; i < freqs.size(); ++i) {
        cycle_at(voxel.f0_hz + freqs[i], buf.data());
        for (int k = 0; k < seq.n_c; ++k) out.samples[k] += weights[i] * buf[k];
    }
    out.samples *= voxel.m0;
    return out;
}

} // namespace

SignalCycle voxel_signal(const SequenceParams &seq, const VoxelParams &voxel,
                         const IntegrationGrid &grid) {
    seq.validate();
    voxel.validate();
    return weighted_cycle(seq, voxel, grid, voxel.t2p_ms, [&](double f0, cx *out) {
        Isochromat iso;
        iso.t1_ms = voxel.t1_ms;
        iso.t2_ms = voxel.t2_ms;
        iso.f0_hz = f0;
        const SignalCycle c = steady_state_cycle(seq, iso);
        for (int k = 0; k < seq.n_c; ++k) out[k] = c.samples[k];
    });
}

SignalCycle voxel_signal(const SteadyStateTable &table, const VoxelParams &voxel,
                         const IntegrationGrid &grid) {
    voxel.validate();
    if (std::abs(table.t1_ms() - voxel.t1_ms) > 1e-9 ||
        std::abs(table.t2_ms() - voxel.t2_ms) > 1e-9)
        throw InvalidParameter("voxel_signal: table relaxation mismatch");
    SequenceParams shape;
    shape.n_c = table.n_c();
    SignalCycle out;
    out.samples = Eigen::VectorXcd::Zero(table.n_c());
    std::vector<double> freqs, weights;
    cauchy_weights(grid, voxel.t2p_ms, freqs, weights);
    std::vector<cx> buf(table.n_c());
    for (size_t i = 0; i < freqs.size(); ++i) {
        table.cycle_at(voxel.f0_hz + freqs[i], buf.data());
        for (int k = 0; k < table.n_c(); ++k) out.samples[k] += weights[i] * buf[k];
    }
    out.samples *= voxel.m0;
    return out;
}

Eigen::VectorXd hrf_reference(const std::vector<uint8_t> &task,
                              double frame_period_s) {
    if (task.empty()) throw InvalidParameter("hrf_reference: empty task");
    if (!(frame_period_s > 0))
        throw InvalidParameter("hrf_reference: frame period must be > 0");
    const double support_s = 32.0;
    const int hrf_len = std::max(1, int(std::ceil(support_s / frame_period_s)) + 1);
    Eigen::VectorXd hrf(hrf_len);
    for (int i = 0; i < hrf_len; ++i) {
        const double t = i * frame_period_s;
        // double gamma: shape 7/scale 1 (peak 6 s) minus 1/6 of shape 17/scale 1
        const double g1 = std::pow(t, 6.0) * std::exp(-t) / std::tgamma(7.0);
        const double g2 = std::pow(t, 16.0) * std::exp(-t) / std::tgamma(17.0);
        hrf[i] = g1 - g2 / 6.0;
    }
    const int n = int(task.size());
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(n);
    for (int t = 0; t < n; ++t) {
        double acc = 0.0;
        for (int j = 0; j <= t && j < hrf_len; ++j)
            if (task[t - j]) acc += hrf[j];
        ref[t] = acc;
    }
    const double peak = ref.cwiseAbs().maxCoeff();
    if (peak > 0) ref /= peak;
    return ref;
}

std::vector<SignalCycle> simulate_fmri_voxel(const SequenceParams &seq,
                                             const VoxelParams &voxel,
                                             const IntegrationGrid &grid,
                                             const FmriProtocol &protocol,
                                             uint64_t voxel_id,
                                             const SteadyStateTable *table) {
    seq.validate();
    voxel.validate();
    protocol.validate();
    const int n = int(protocol.task.size());
    const Eigen::VectorXd ref = hrf_reference(protocol.task, protocol.frame_period_s);

    std::vector<SignalCycle> series(n);
    for (int t = 0; t < n; ++t) {
        VoxelParams frame_voxel = voxel;
        frame_voxel.t2p_ms = voxel.t2p_ms - protocol.delta_t2p_ms * ref[t];
        if (!(frame_voxel.t2p_ms > 0))
            throw InvalidParameter("simulate_fmri_voxel: activation drives T2' <= 0");
        const double t_s = t * protocol.frame_period_s;
        frame_voxel.f0_hz = voxel.f0_hz +
                            protocol.drift_hz_per_min * (t_s / 60.0) +
                            protocol.resp_amp_hz *
                                std::sin(2.0 * kPi * t_s / protocol.resp_period_s);
        series[t] = table ? voxel_signal(*table, frame_voxel, grid)
                          : voxel_signal(seq, frame_voxel, grid);
    }

    if (protocol.add_noise) {
        double mean_combined = 0.0;
        for (const auto &c : series) mean_combined += c.samples.norm() / n;
        if (!(mean_combined > 0))
            throw InvalidParameter("simulate_fmri_voxel: zero signal, tSNR unreachable");
        const double ratio = std::pow(10.0, protocol.target_tsnr_db / 20.0);
        // std of the combined magnitude is sigma_c / sqrt(2) to first order
        const double sigma_c = std::sqrt(2.0) * mean_combined / ratio;
        Rng rng(derive_seed(protocol.seed, voxel_id));
        for (auto &c : series)
            for (int k = 0; k < c.samples.size(); ++k)
                c.samples[k] += sigma_c * rng.cnormal();
    }
    return series;
}

double percent_signal_change(const SequenceParams &seq, const VoxelParams &rest,
                             const VoxelParams &active, const IntegrationGrid &grid) {
    const double s_rest = voxel_signal(seq, rest, grid).samples.norm();
    const double s_act = voxel_signal(seq, active, grid).samples.norm();
    if (!(s_rest > 0)) throw InvalidParameter("percent_signal_change: zero rest signal");
    return (s_rest - s_act) / s_rest;
}

double estimate_te_eff(const SequenceParams &seq, const VoxelParams &rest,
                       const VoxelParams &active, const IntegrationGrid &grid) {
    rest.validate();
    active.validate();
    if (std::abs(rest.t1_ms - active.t1_ms) > 1e-12 ||
        std::abs(rest.t2_ms - active.t2_ms) > 1e-12 ||
        std::abs(rest.f0_hz - active.f0_hz) > 1e-12 || rest.m0 != active.m0)
        throw InvalidParameter("estimate_te_eff: voxels must differ only in t2p");
    const double dr2p = 1e3 * (1.0 / active.t2p_ms - 1.0 / rest.t2p_ms);
    if (dr2p == 0) throw InvalidParameter("estimate_te_eff: dR2' is zero");
    const double pc = percent_signal_change(seq, rest, active, grid);
    return 1e3 * pc / dr2p;
}

double t2p_from_r2s(double t2_ms, double r2s_hz) {
    const double r2p = r2s_hz - 1e3 / t2_ms;
    if (!(r2p > 0))
        throw InvalidParameter("t2p_from_r2s: R2* must exceed 1/T2");
    return 1e3 / r2p;
}

} // namespace ossi
