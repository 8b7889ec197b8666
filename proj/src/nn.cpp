#include "ebgan/nn.hpp"

#include <Eigen/Core>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ebgan {

namespace {

using ERowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const ERowMat> cmap(const Matrix& m) {
    return {m.data.data(), static_cast<Eigen::Index>(m.rows),
            static_cast<Eigen::Index>(m.cols)};
}

Eigen::Map<ERowMat> map(Matrix& m) {
    return {m.data.data(), static_cast<Eigen::Index>(m.rows),
            static_cast<Eigen::Index>(m.cols)};
}

void apply_activation(Activation act, const Matrix& z, Matrix& a) {
    switch (act) {
        case Activation::Relu:
            map(a) = cmap(z).cwiseMax(0.0);
            break;
        case Activation::Sigmoid:
            map(a) = (1.0 + (-cmap(z).array()).exp()).inverse().matrix();
            break;
        case Activation::Identity:
            a = z;
            break;
        case Activation::Tanh:
            map(a) = cmap(z).array().tanh().matrix();
            break;
    }
}

// dZ = dA .* act'(Z), with the derivative written in terms of Z and A.
// The ReLU subgradient at 0 is 0.
void activation_backward(Activation act, const Matrix& z, const Matrix& a,
                         const Matrix& da, Matrix& dz) {
    switch (act) {
        case Activation::Relu:
            map(dz) = (cmap(z).array() > 0.0).select(cmap(da), 0.0);
            break;
        case Activation::Sigmoid:
            map(dz) = (cmap(da).array() * cmap(a).array() *
                       (1.0 - cmap(a).array()))
                          .matrix();
            break;
        case Activation::Identity:
            dz = da;
            break;
        case Activation::Tanh:
            map(dz) =
                (cmap(da).array() * (1.0 - cmap(a).array().square())).matrix();
            break;
    }
}

}  // namespace

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Identity: return "identity";
        case Activation::Tanh: return "tanh";
    }
    throw std::logic_error("activation_name: bad enum");
}

Activation activation_from_name(std::string_view name) {
    if (name == "relu") return Activation::Relu;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "identity") return Activation::Identity;
    if (name == "tanh") return Activation::Tanh;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        n += weights[l].size() + biases[l].size();
    }
    return n;
}

bool MlpParams::same_shape(const MlpParams& o) const {
    if (layer_sizes != o.layer_sizes) return false;
    if (weights.size() != o.weights.size()) return false;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (!weights[l].same_shape(o.weights[l])) return false;
        if (!biases[l].same_shape(o.biases[l])) return false;
    }
    return true;
}

MlpParams zeros_like(const MlpParams& p) {
    MlpParams z;
    z.layer_sizes = p.layer_sizes;
    z.hidden_activation = p.hidden_activation;
    z.output_activation = p.output_activation;
    z.weights.reserve(p.weights.size());
    z.biases.reserve(p.biases.size());
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        z.weights.emplace_back(p.weights[l].rows, p.weights[l].cols);
        z.biases.emplace_back(p.biases[l].rows, p.biases[l].cols);
    }
    return z;
}

bool all_finite(const MlpParams& p) {
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        if (!all_finite(p.weights[l]) || !all_finite(p.biases[l])) return false;
    }
    return true;
}

double max_abs_diff(const MlpParams& a, const MlpParams& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        m = std::max(m, max_abs_diff(a.weights[l], b.weights[l]));
        m = std::max(m, max_abs_diff(a.biases[l], b.biases[l]));
    }
    return m;
}

double max_abs(const MlpParams& a) {
    double m = 0.0;
    for_each_tensor(a, [&](const Matrix& t) {
        for (double v : t.data) m = std::max(m, std::abs(v));
    });
    return m;
}

MlpParams init_mlp(const std::vector<std::size_t>& layer_sizes,
                   Activation hidden_activation, Activation output_activation,
                   double init_std, RngStream& stream) {
    if (layer_sizes.size() < 2) {
        throw std::invalid_argument("init_mlp: need at least input and output sizes");
    }
    if (!(init_std > 0.0)) {
        throw std::invalid_argument("init_mlp: init_std must be > 0");
    }
    MlpParams p;
    p.layer_sizes = layer_sizes;
    p.hidden_activation = hidden_activation;
    p.output_activation = output_activation;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const std::size_t fan_in = layer_sizes[l];
        const std::size_t fan_out = layer_sizes[l + 1];
        const double sd = init_std / std::sqrt(static_cast<double>(fan_in));
        p.weights.push_back(sample_gaussian(stream, fan_out, fan_in, 0.0, sd));
        p.biases.emplace_back(1, fan_out);
    }
    return p;
}

std::pair<Matrix, ForwardCache> forward(const MlpParams& params, const Matrix& x) {
    if (x.cols != params.input_dim()) {
        throw std::invalid_argument("forward: input width does not match layer 0");
    }
    ForwardCache cache;
    cache.input = x;
    cache.pre_activations.reserve(params.layer_count());
    cache.activations.reserve(params.layer_count());

    const Matrix* a_prev = &cache.input;
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        Matrix z(a_prev->rows, params.layer_sizes[l + 1]);
        map(z).noalias() = cmap(*a_prev) * cmap(params.weights[l]).transpose();
        map(z).rowwise() += cmap(params.biases[l]).row(0);

        Matrix a(z.rows, z.cols);
        const Activation act = (l + 1 == params.layer_count())
                                   ? params.output_activation
                                   : params.hidden_activation;
        apply_activation(act, z, a);
        cache.pre_activations.push_back(std::move(z));
        cache.activations.push_back(std::move(a));
        a_prev = &cache.activations.back();
    }
    return {cache.activations.back(), std::move(cache)};
}

Matrix forward_only(const MlpParams& params, const Matrix& x) {
    if (x.cols != params.input_dim()) {
        throw std::invalid_argument("forward: input width does not match layer 0");
    }
    Matrix a = x;
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        Matrix z(a.rows, params.layer_sizes[l + 1]);
        map(z).noalias() = cmap(a) * cmap(params.weights[l]).transpose();
        map(z).rowwise() += cmap(params.biases[l]).row(0);
        const Activation act = (l + 1 == params.layer_count())
                                   ? params.output_activation
                                   : params.hidden_activation;
        Matrix out(z.rows, z.cols);
        apply_activation(act, z, out);
        a = std::move(out);
    }
    return a;
}

namespace {

std::pair<MlpParams, Matrix> backward_impl(const MlpParams& params,
                                           const ForwardCache& cache,
                                           const Matrix& dtop, bool from_preact,
                                           BackwardOptions opts) {
    const std::size_t layers = params.layer_count();
    if (cache.activations.size() != layers ||
        !dtop.same_shape(cache.activations.back())) {
        throw std::invalid_argument("backward: cache/params/cotangent mismatch");
    }
    MlpParams grads = opts.param_grads ? zeros_like(params) : MlpParams{};
    Matrix da = dtop;
    Matrix dx;
    for (std::size_t li = layers; li-- > 0;) {
        Matrix dz(da.rows, da.cols);
        if (li + 1 == layers && from_preact) {
            dz = std::move(da);
        } else {
            const Activation act = (li + 1 == layers) ? params.output_activation
                                                      : params.hidden_activation;
            activation_backward(act, cache.pre_activations[li],
                                cache.activations[li], da, dz);
        }
        const Matrix& a_prev = (li == 0) ? cache.input : cache.activations[li - 1];
        if (opts.param_grads) {
            map(grads.weights[li]).noalias() = cmap(dz).transpose() * cmap(a_prev);
            map(grads.biases[li]) = cmap(dz).colwise().sum();
        }
        const bool need_da = (li > 0) || opts.input_grad;
        if (need_da) {
            Matrix prev(dz.rows, params.layer_sizes[li]);
            map(prev).noalias() = cmap(dz) * cmap(params.weights[li]);
            if (li == 0) {
                dx = std::move(prev);
            } else {
                da = std::move(prev);
            }
        }
    }
    return {std::move(grads), std::move(dx)};
}

}  // namespace

std::pair<MlpParams, Matrix> backward(const MlpParams& params,
                                      const ForwardCache& cache, const Matrix& dy,
                                      BackwardOptions opts) {
    return backward_impl(params, cache, dy, false, opts);
}

std::pair<MlpParams, Matrix> backward_from_logits(const MlpParams& params,
                                                  const ForwardCache& cache,
                                                  const Matrix& dz_last,
                                                  BackwardOptions opts) {
    return backward_impl(params, cache, dz_last, true, opts);
}

MlpParams finite_diff_grad(const std::function<double(const MlpParams&)>& loss,
                           const MlpParams& params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite_diff_grad: h must be > 0");
    MlpParams grads = zeros_like(params);
    MlpParams probe = params;
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        auto diff_tensor = [&](Matrix& pt, Matrix& gt) {
            for (std::size_t i = 0; i < pt.size(); ++i) {
                const double orig = pt.data[i];
                pt.data[i] = orig + h;
                const double up = loss(probe);
                pt.data[i] = orig - h;
                const double down = loss(probe);
                pt.data[i] = orig;
                gt.data[i] = (up - down) / (2.0 * h);
            }
        };
        diff_tensor(probe.weights[l], grads.weights[l]);
        diff_tensor(probe.biases[l], grads.biases[l]);
    }
    return grads;
}

void save_mlp(const MlpParams& params, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_mlp: cannot open " + path.string());
    out << "ebgan-mlp v1\n";
    out << "layers " << params.layer_sizes.size();
    for (std::size_t s : params.layer_sizes) out << ' ' << s;
    out << '\n';
    out << "activations " << activation_name(params.hidden_activation) << ' '
        << activation_name(params.output_activation) << '\n';
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
        auto dump = [&](const char* tag, const Matrix& t) {
            out << tag << ' ' << l << ' ' << t.rows << ' ' << t.cols << '\n';
            for (std::size_t i = 0; i < t.rows; ++i) {
                for (std::size_t j = 0; j < t.cols; ++j) {
                    if (j) out << ' ';
                    out << fmt17(t.at(i, j));
                }
                out << '\n';
            }
        };
        dump("W", params.weights[l]);
        dump("b", params.biases[l]);
    }
    if (!out) throw std::runtime_error("save_mlp: write failed for " + path.string());
}

MlpParams load_mlp(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_mlp: cannot open " + path.string());
    std::string magic, version;
    in >> magic >> version;
    if (magic != "ebgan-mlp" || version != "v1") {
        throw std::runtime_error("load_mlp: unsupported checkpoint header in " +
                                 path.string());
    }
    std::string tag;
    std::size_t count = 0;
    in >> tag >> count;
    if (tag != "layers" || count < 2) {
        throw std::runtime_error("load_mlp: bad layer record");
    }
    MlpParams p;
    p.layer_sizes.resize(count);
    for (auto& s : p.layer_sizes) in >> s;
    std::string hidden, output;
    in >> tag >> hidden >> output;
    if (tag != "activations") throw std::runtime_error("load_mlp: bad activations record");
    p.hidden_activation = activation_from_name(hidden);
    p.output_activation = activation_from_name(output);
    for (std::size_t l = 0; l + 1 < count; ++l) {
        auto read_tensor = [&](const char* want) {
            std::string kind, token;
            std::size_t idx, rows, cols;
            in >> kind >> idx >> rows >> cols;
            if (kind != want || idx != l) {
                throw std::runtime_error("load_mlp: unexpected tensor record");
            }
            Matrix t(rows, cols);
            for (double& v : t.data) {
                in >> token;
                v = parse_double(token);
            }
            return t;
        };
        p.weights.push_back(read_tensor("W"));
        p.biases.push_back(read_tensor("b"));
    }
    if (!in) throw std::runtime_error("load_mlp: truncated checkpoint " + path.string());
    return p;
}

}  // namespace ebgan
