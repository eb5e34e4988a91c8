#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pinnosc/grid.hpp"
#include "pinnosc/mlp.hpp"
#include "pinnosc/pde.hpp"

namespace pinnosc {

struct PinnLossReport {
    double total = 0.0;
    double residual_term = 0.0;
    double ic_term = 0.0;
    double bc_term = 0.0;
    int epoch = 0;
};

struct PinnLossWeights {
    double residual = 1.0;
    double ic = 1.0;
    double bc = 1.0;
};

/// Physics-informed loss over a fixed collocation set, recorded once as a set
/// of per-chunk tapes (fixed chunk size, so the reduction order — and thus
/// every bit of the result — does not depend on the worker count). eval()
/// re-runs forward+backward and exposes the flat gradient in params() order.
class PinnLossEngine {
  public:
    PinnLossEngine(MlpModel& model, const PdeSpec& spec, const DomainSpec& domain,
                   const CollocationSet& colloc, PinnLossWeights weights = {},
                   int threads = 1);
    ~PinnLossEngine();
    PinnLossEngine(PinnLossEngine&&) noexcept;

    PinnLossReport eval();
    const std::vector<double>& grad() const;
    std::size_t dim() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot recorded loss (engine built and evaluated once).
PinnLossReport pinn_loss(MlpModel& model, const PdeSpec& spec, const DomainSpec& domain,
                         const CollocationSet& colloc, PinnLossWeights weights = {});

/// Plain-jet loss of an arbitrary differentiable field (no recording); used to
/// check fields that cannot go on a tape, e.g. a closed-form solution.
PinnLossReport pinn_loss_field(const PdeSpec& spec, const DomainSpec& domain,
                               const JetField& field, const CollocationSet& colloc,
                               PinnLossWeights weights = {});

struct PinnTrainConfig {
    std::string optimizer = "lbfgs";  // "adam" | "lbfgs" | "adam+lbfgs"
    int adam_epochs = 0;
    double adam_lr = 1e-3;
    int lbfgs_epochs = 3500;
    PinnLossWeights weights;
    bool plateau_stop = false;
    double plateau_rel_change = 1e-6;
    int plateau_window = 200;
    int threads = 1;
    std::function<void(std::string_view)> log;
};

/// Trains in place; returns one report per epoch (Adam epochs first, then
/// L-BFGS outer iterations). Deterministic under fixed model seed and inputs.
std::vector<PinnLossReport> train_pinn(MlpModel& model, const PdeSpec& spec,
                                       const DomainSpec& domain,
                                       const CollocationSet& colloc,
                                       const PinnTrainConfig& cfg);

/// Uniform inclusive grids over [t0, t1] x [x_min, x_max]; k_t rows of
/// channel-stacked profiles.
GridSolution infer_grid(const MlpModel& model, const DomainSpec& domain, int k_t, int k_x,
                        double t0, double t1);

void write_loss_history(const std::string& path, const std::vector<PinnLossReport>& history);

}  // namespace pinnosc
