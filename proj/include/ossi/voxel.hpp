// T2'-weighted voxel signals: Cauchy intravoxel frequency spread over
// isochromat steady states, fMRI time-course synthesis, and effective-TE
// estimation.
#pragma once

#include "ossi/bloch.hpp"
#include "ossi/core.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ossi {

struct VoxelParams {
    cx m0 = cx(1.0, 0.0);
    double t1_ms = 1433.2;
    double t2_ms = 92.6;
    double t2p_ms = 148.3;
    double f0_hz = 0.0;

    void validate() const;
    double t2star_ms() const { return 1.0 / (1.0 / t2_ms + 1.0 / t2p_ms); }
    double r2star_hz() const { return 1e3 * (1.0 / t2_ms + 1.0 / t2p_ms); }
};

struct IntegrationGrid {
    double f_min_hz = -200.0;
    double f_max_hz = 200.0;
    int n_iso = 4000;

    void validate() const;
};

struct FmriProtocol {
    std::vector<uint8_t> task;      // one entry per slow frame; nonzero = active
    double frame_period_s = 0.15;   // n_c * TR for the default sequence
    double delta_t2p_ms = 15.4;
    double drift_hz_per_min = 1.0;
    double resp_amp_hz = 0.5;
    double resp_period_s = 4.2;
    double target_tsnr_db = 38.0;
    bool add_noise = true;
    uint64_t seed = 0;

    void validate() const;
};

// Cauchy line shape G(f) = gamma / (pi (gamma^2 + f^2)), gamma = 1/(2 pi T2')
// with T2' in seconds; density per Hz.
double cauchy_pdf(double f_hz, double t2p_ms);

// Quadrature nodes and renormalized weights for the intravoxel spread.
void cauchy_weights(const IntegrationGrid &grid, double t2p_ms,
                    std::vector<double> &freqs, std::vector<double> &weights);

// Riemann-sum voxel signal; isochromat steady states computed directly.
SignalCycle voxel_signal(const SequenceParams &seq, const VoxelParams &voxel,
                         const IntegrationGrid &grid);

// Same quadrature evaluated through a precomputed frequency-response table
// (table T1/T2 must match the voxel). Used by phantom and dictionary builds.
SignalCycle voxel_signal(const SteadyStateTable &table, const VoxelParams &voxel,
                         const IntegrationGrid &grid);

// Task convolved with the canonical double-gamma HRF (peak 6 s, undershoot
// 16 s, ratio 1/6, 32 s support), truncated to the task length and
// peak-normalized to 1.
Eigen::VectorXd hrf_reference(const std::vector<uint8_t> &task,
                              double frame_period_s);

// Per-frame voxel simulation: T2'(t) = baseline - dT2' * reference(t), f0
// drift and respiratory modulation, complex white noise calibrated so the
// 2-norm-combined series hits the target tSNR. Fully determined by
// (protocol.seed, voxel_id).
std::vector<SignalCycle> simulate_fmri_voxel(const SequenceParams &seq,
                                             const VoxelParams &voxel,
                                             const IntegrationGrid &grid,
                                             const FmriProtocol &protocol,
                                             uint64_t voxel_id = 0,
                                             const SteadyStateTable *table = nullptr);

// Percent change of the 2-norm-combined magnitude between rest and active
// voxels (positive when the active signal is smaller).
double percent_signal_change(const SequenceParams &seq, const VoxelParams &rest,
                             const VoxelParams &active, const IntegrationGrid &grid);

// TE_eff = percent change / dR2', in ms. rest and active must differ only in
// t2p.
double estimate_te_eff(const SequenceParams &seq, const VoxelParams &rest,
                       const VoxelParams &active, const IntegrationGrid &grid);

// T2' (ms) for a target R2* (Hz) at fixed T2 (ms); throws if infeasible.
double t2p_from_r2s(double t2_ms, double r2s_hz);

} // namespace ossi
