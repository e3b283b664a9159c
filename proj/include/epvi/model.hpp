#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epvi {

// Columnar dataset: `rows` observations, each with `features` inputs and
// `outputs` responses, both stored row-major. `family` names the model the
// data was generated for ("gaussian", "logistic", "tlsa").
struct Dataset {
    std::string family;
    std::size_t rows = 0;
    int features = 0;
    int outputs = 0;
    std::vector<double> x;  // rows x features
    std::vector<double> y;  // rows x outputs

    std::span<const double> x_row(std::size_t r) const {
        return {x.data() + r * static_cast<std::size_t>(features),
                static_cast<std::size_t>(features)};
    }
    std::span<const double> y_row(std::size_t r) const {
        return {y.data() + r * static_cast<std::size_t>(outputs),
                static_cast<std::size_t>(outputs)};
    }

    // rows selected by index, in order
    Dataset select(std::span<const std::size_t> idx) const;
};

// One shard of the partitioned data. Owns its block so concurrent fits never
// share mutable state.
struct DataShard {
    int shard_id = 0;
    Dataset block;

    std::size_t rows() const { return block.rows; }
};

// Tempered log-joint interface: beta * [log prior + reparameterization
// Jacobians] + log likelihood of the shard, with analytic gradient and
// Hessian trace. Callbacks are pure; safe for concurrent evaluation.
class Model {
  public:
    virtual ~Model() = default;

    int dim() const { return dim_; }
    double prior_temper() const { return prior_temper_; }

    virtual double log_joint(std::span<const double> theta) const = 0;
    virtual std::vector<double> grad(std::span<const double> theta) const = 0;
    virtual double hessian_trace(std::span<const double> theta) const = 0;

  protected:
    Model(int dim, double prior_temper) : dim_(dim), prior_temper_(prior_temper) {
        if (dim < 1) throw std::invalid_argument("Model: dim must be >= 1");
        if (!(prior_temper > 0.0) || prior_temper > 1.0)
            throw std::invalid_argument("Model: prior_temper must be in (0, 1]");
    }

    void check_dim(std::span<const double> theta) const {
        if (static_cast<int>(theta.size()) != dim_)
            throw std::invalid_argument("Model: theta dimension mismatch");
    }

  private:
    int dim_;
    double prior_temper_;
};

}  // namespace epvi
