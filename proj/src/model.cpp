#include "polarmin/model.hpp"

#include "polarmin/errors.hpp"

#include <cmath>
#include <cstring>
#include <string_view>

namespace polarmin {

namespace {

// out = W . x
void matVec(const Tensor& w, const double* x, double* out) {
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double* wr = w.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c) acc += wr[c] * x[c];
        out[r] = acc;
    }
}

// out += W^T . x  (x has w.rows entries, out has w.cols)
void matVecTAccum(const Tensor& w, const double* x, double* out) {
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double* wr = w.row(r);
        const double xr = x[r];
        if (xr == 0.0) continue;
        for (std::size_t c = 0; c < w.cols; ++c) out[c] += xr * wr[c];
    }
}

// dW += a (x) b
void addOuter(Tensor& dw, const double* a, const double* b) {
    for (std::size_t r = 0; r < dw.rows; ++r) {
        double* row = dw.row(r);
        const double ar = a[r];
        if (ar == 0.0) continue;
        for (std::size_t c = 0; c < dw.cols; ++c) row[c] += ar * b[c];
    }
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

// Max-subtracted softmax over scores[0..n); returns logZ = max + log(sum exp).
double softmaxInPlace(double* scores, std::size_t n) {
    double mx = scores[0];
    for (std::size_t i = 1; i < n; ++i) mx = std::max(mx, scores[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = std::exp(scores[i] - mx);
        sum += scores[i];
    }
    for (std::size_t i = 0; i < n; ++i) scores[i] /= sum;
    return mx + std::log(sum);
}

// Everything the backward pass needs, one example at a time. Rows are sliced
// to true lengths before this is built, so PAD never enters the arithmetic.
struct ExampleTrace {
    std::size_t m = 0; // input positions
    std::size_t L = 0; // predicted positions (targetLen - 1)
    std::vector<double> x, qe, ke, ve, alphaE, ae, h, kc, vc;
    std::vector<double> y, qd, kd, vd, alphaD, ad, u, qc, beta, ac, cvec, g, fvec;
    std::vector<double> prob;   // L x vocab
    std::vector<double> zt;     // z[target] per position
    std::vector<double> logZ;   // log partition per position
};

void embedInto(const ModelParams& p, int id, std::size_t pos, double* out) {
    const std::size_t d = p.config.embedDim;
    if (id < 0 || static_cast<std::size_t>(id) >= p.config.vocabSize) {
        throw DataError("model: token id " + std::to_string(id) + " out of range");
    }
    if (pos >= p.config.maxPositions) {
        throw DataError("model: sequence length exceeds maxPositions="
                        + std::to_string(p.config.maxPositions));
    }
    const double* e = p.tensors.embedding.row(static_cast<std::size_t>(id));
    const double* pe = p.positions.row(pos);
    for (std::size_t i = 0; i < d; ++i) out[i] = e[i] + pe[i];
}

void runForward(const ModelParams& p, const std::vector<int>& in,
                const std::vector<int>& tgt, ExampleTrace& t) {
    if (in.empty()) throw DataError("model: empty input sequence");
    if (tgt.size() < 2) throw DataError("model: target needs BOS and at least one token");

    const std::size_t d = p.config.embedDim;
    const std::size_t hd = p.config.hiddenDim;
    const std::size_t V = p.config.vocabSize;
    const double invSqrtD = 1.0 / std::sqrt(static_cast<double>(d));
    const TensorSet& w = p.tensors;

    t.m = in.size();
    t.L = tgt.size() - 1;
    const std::size_t m = t.m, L = t.L;

    t.x.assign(m * d, 0.0); t.qe.assign(m * d, 0.0); t.ke.assign(m * d, 0.0);
    t.ve.assign(m * d, 0.0); t.alphaE.assign(m * m, 0.0); t.ae.assign(m * d, 0.0);
    t.h.assign(m * d, 0.0); t.kc.assign(m * d, 0.0); t.vc.assign(m * d, 0.0);
    t.y.assign(L * d, 0.0); t.qd.assign(L * d, 0.0); t.kd.assign(L * d, 0.0);
    t.vd.assign(L * d, 0.0); t.alphaD.assign(L * L, 0.0); t.ad.assign(L * d, 0.0);
    t.u.assign(L * d, 0.0); t.qc.assign(L * d, 0.0); t.beta.assign(L * m, 0.0);
    t.ac.assign(L * d, 0.0); t.cvec.assign(L * d, 0.0); t.g.assign(L * hd, 0.0);
    t.fvec.assign(L * d, 0.0); t.prob.assign(L * V, 0.0);
    t.zt.assign(L, 0.0); t.logZ.assign(L, 0.0);

    // encoder: h = x + encO . attn(x)
    for (std::size_t pos = 0; pos < m; ++pos) {
        embedInto(p, in[pos], pos, &t.x[pos * d]);
    }
    for (std::size_t pos = 0; pos < m; ++pos) {
        matVec(w.encQ, &t.x[pos * d], &t.qe[pos * d]);
        matVec(w.encK, &t.x[pos * d], &t.ke[pos * d]);
        matVec(w.encV, &t.x[pos * d], &t.ve[pos * d]);
    }
    for (std::size_t pos = 0; pos < m; ++pos) {
        double* row = &t.alphaE[pos * m];
        for (std::size_t q = 0; q < m; ++q) {
            row[q] = invSqrtD * dot(&t.qe[pos * d], &t.ke[q * d], d);
        }
        softmaxInPlace(row, m);
        for (std::size_t q = 0; q < m; ++q) {
            const double a = row[q];
            for (std::size_t i = 0; i < d; ++i) t.ae[pos * d + i] += a * t.ve[q * d + i];
        }
        std::vector<double> oe(d, 0.0);
        matVec(w.encO, &t.ae[pos * d], oe.data());
        for (std::size_t i = 0; i < d; ++i) t.h[pos * d + i] = t.x[pos * d + i] + oe[i];
    }
    for (std::size_t pos = 0; pos < m; ++pos) {
        matVec(w.crossK, &t.h[pos * d], &t.kc[pos * d]);
        matVec(w.crossV, &t.h[pos * d], &t.vc[pos * d]);
    }

    // decoder, teacher-forced on tgt[0..L)
    for (std::size_t j = 0; j < L; ++j) {
        embedInto(p, tgt[j], j, &t.y[j * d]);
        matVec(w.decQ, &t.y[j * d], &t.qd[j * d]);
        matVec(w.decK, &t.y[j * d], &t.kd[j * d]);
        matVec(w.decV, &t.y[j * d], &t.vd[j * d]);
    }
    std::vector<double> scratch(d, 0.0);
    std::vector<double> pre(hd, 0.0);
    for (std::size_t j = 0; j < L; ++j) {
        // masked self-attention over positions 0..j
        double* arow = &t.alphaD[j * L];
        for (std::size_t q = 0; q <= j; ++q) {
            arow[q] = invSqrtD * dot(&t.qd[j * d], &t.kd[q * d], d);
        }
        softmaxInPlace(arow, j + 1);
        for (std::size_t q = 0; q <= j; ++q) {
            const double a = arow[q];
            for (std::size_t i = 0; i < d; ++i) t.ad[j * d + i] += a * t.vd[q * d + i];
        }
        matVec(w.decO, &t.ad[j * d], scratch.data());
        for (std::size_t i = 0; i < d; ++i) t.u[j * d + i] = t.y[j * d + i] + scratch[i];

        // cross-attention over encoder states
        matVec(w.crossQ, &t.u[j * d], &t.qc[j * d]);
        double* brow = &t.beta[j * m];
        for (std::size_t q = 0; q < m; ++q) {
            brow[q] = invSqrtD * dot(&t.qc[j * d], &t.kc[q * d], d);
        }
        softmaxInPlace(brow, m);
        for (std::size_t q = 0; q < m; ++q) {
            const double b = brow[q];
            for (std::size_t i = 0; i < d; ++i) t.ac[j * d + i] += b * t.vc[q * d + i];
        }
        matVec(w.crossO, &t.ac[j * d], scratch.data());
        for (std::size_t i = 0; i < d; ++i) t.cvec[j * d + i] = t.u[j * d + i] + scratch[i];

        // position-wise feed-forward with residual
        matVec(w.ffnW1, &t.cvec[j * d], pre.data());
        for (std::size_t i = 0; i < hd; ++i) t.g[j * hd + i] = std::tanh(pre[i] + w.ffnB1.data[i]);
        matVec(w.ffnW2, &t.g[j * hd], scratch.data());
        for (std::size_t i = 0; i < d; ++i) {
            t.fvec[j * d + i] = t.cvec[j * d + i] + scratch[i] + w.ffnB2.data[i];
        }

        // logits through the (possibly tied) output matrix
        const Tensor& out = p.outputMatrix();
        double* probRow = &t.prob[j * V];
        matVec(out, &t.fvec[j * d], probRow);
        const int nextId = tgt[j + 1];
        if (nextId < 0 || static_cast<std::size_t>(nextId) >= V) {
            throw DataError("model: target id " + std::to_string(nextId) + " out of range");
        }
        t.zt[j] = probRow[static_cast<std::size_t>(nextId)];
        t.logZ[j] = softmaxInPlace(probRow, V);
    }
}

double traceNll(const ExampleTrace& t) {
    double nll = 0.0;
    for (std::size_t j = 0; j < t.L; ++j) nll -= t.zt[j] - t.logZ[j];
    return nll;
}

// Backpropagates w * (summed example NLL) into grads.
void runBackward(const ModelParams& p, const std::vector<int>& in,
                 const std::vector<int>& tgt, const ExampleTrace& t,
                 double wgt, TensorSet& grads) {
    const std::size_t d = p.config.embedDim;
    const std::size_t hd = p.config.hiddenDim;
    const std::size_t V = p.config.vocabSize;
    const double invSqrtD = 1.0 / std::sqrt(static_cast<double>(d));
    const TensorSet& w = p.tensors;
    const Tensor& out = p.outputMatrix();
    Tensor& dOut = p.config.tieOutputEmbedding ? grads.embedding : grads.outProj;
    const std::size_t m = t.m, L = t.L;

    std::vector<double> dy(L * d, 0.0), dkd(L * d, 0.0), dvd(L * d, 0.0);
    std::vector<double> dkc(m * d, 0.0), dvc(m * d, 0.0), dh(m * d, 0.0);
    std::vector<double> dx(m * d, 0.0), dke(m * d, 0.0), dve(m * d, 0.0);
    std::vector<double> dz(V, 0.0), df(d, 0.0), dgv(hd, 0.0), dpre(hd, 0.0);
    std::vector<double> dc(d, 0.0), dac(d, 0.0), du(d, 0.0), dad(d, 0.0);
    std::vector<double> dqcl(d, 0.0), dqdl(d, 0.0), dalpha(std::max(m, L), 0.0);

    for (std::size_t j = 0; j < L; ++j) {
        const double* probRow = &t.prob[j * V];
        for (std::size_t v = 0; v < V; ++v) dz[v] = wgt * probRow[v];
        dz[static_cast<std::size_t>(tgt[j + 1])] -= wgt;

        // output matrix and f
        addOuter(dOut, dz.data(), &t.fvec[j * d]);
        std::fill(df.begin(), df.end(), 0.0);
        matVecTAccum(out, dz.data(), df.data());

        // feed-forward (residual: dc starts from df)
        for (std::size_t i = 0; i < d; ++i) grads.ffnB2.data[i] += df[i];
        addOuter(grads.ffnW2, df.data(), &t.g[j * hd]);
        std::fill(dgv.begin(), dgv.end(), 0.0);
        matVecTAccum(w.ffnW2, df.data(), dgv.data());
        for (std::size_t i = 0; i < hd; ++i) {
            const double gi = t.g[j * hd + i];
            dpre[i] = dgv[i] * (1.0 - gi * gi);
            grads.ffnB1.data[i] += dpre[i];
        }
        addOuter(grads.ffnW1, dpre.data(), &t.cvec[j * d]);
        for (std::size_t i = 0; i < d; ++i) dc[i] = df[i];
        matVecTAccum(w.ffnW1, dpre.data(), dc.data());

        // cross-attention output projection (residual: du starts from dc)
        addOuter(grads.crossO, dc.data(), &t.ac[j * d]);
        std::fill(dac.begin(), dac.end(), 0.0);
        matVecTAccum(w.crossO, dc.data(), dac.data());
        for (std::size_t i = 0; i < d; ++i) du[i] = dc[i];

        // cross-attention softmax
        const double* brow = &t.beta[j * m];
        double dotB = 0.0;
        for (std::size_t q = 0; q < m; ++q) {
            dalpha[q] = dot(dac.data(), &t.vc[q * d], d);
            for (std::size_t i = 0; i < d; ++i) dvc[q * d + i] += brow[q] * dac[i];
            dotB += brow[q] * dalpha[q];
        }
        std::fill(dqcl.begin(), dqcl.end(), 0.0);
        for (std::size_t q = 0; q < m; ++q) {
            const double ds = invSqrtD * brow[q] * (dalpha[q] - dotB);
            for (std::size_t i = 0; i < d; ++i) {
                dqcl[i] += ds * t.kc[q * d + i];
                dkc[q * d + i] += ds * t.qc[j * d + i];
            }
        }
        addOuter(grads.crossQ, dqcl.data(), &t.u[j * d]);
        matVecTAccum(w.crossQ, dqcl.data(), du.data());

        // decoder self-attention (residual: dy[j] gets du)
        addOuter(grads.decO, du.data(), &t.ad[j * d]);
        std::fill(dad.begin(), dad.end(), 0.0);
        matVecTAccum(w.decO, du.data(), dad.data());
        for (std::size_t i = 0; i < d; ++i) dy[j * d + i] += du[i];

        const double* arow = &t.alphaD[j * L];
        double dotA = 0.0;
        for (std::size_t q = 0; q <= j; ++q) {
            dalpha[q] = dot(dad.data(), &t.vd[q * d], d);
            for (std::size_t i = 0; i < d; ++i) dvd[q * d + i] += arow[q] * dad[i];
            dotA += arow[q] * dalpha[q];
        }
        std::fill(dqdl.begin(), dqdl.end(), 0.0);
        for (std::size_t q = 0; q <= j; ++q) {
            const double ds = invSqrtD * arow[q] * (dalpha[q] - dotA);
            for (std::size_t i = 0; i < d; ++i) {
                dqdl[i] += ds * t.kd[q * d + i];
                dkd[q * d + i] += ds * t.qd[j * d + i];
            }
        }
        addOuter(grads.decQ, dqdl.data(), &t.y[j * d]);
        matVecTAccum(w.decQ, dqdl.data(), &dy[j * d]);
    }

    // fold decoder key/value paths, then the embedded target rows
    for (std::size_t q = 0; q < L; ++q) {
        addOuter(grads.decK, &dkd[q * d], &t.y[q * d]);
        matVecTAccum(w.decK, &dkd[q * d], &dy[q * d]);
        addOuter(grads.decV, &dvd[q * d], &t.y[q * d]);
        matVecTAccum(w.decV, &dvd[q * d], &dy[q * d]);
        double* erow = grads.embedding.row(static_cast<std::size_t>(tgt[q]));
        for (std::size_t i = 0; i < d; ++i) erow[i] += dy[q * d + i];
    }

    // cross keys/values feed the encoder states
    for (std::size_t q = 0; q < m; ++q) {
        addOuter(grads.crossK, &dkc[q * d], &t.h[q * d]);
        matVecTAccum(w.crossK, &dkc[q * d], &dh[q * d]);
        addOuter(grads.crossV, &dvc[q * d], &t.h[q * d]);
        matVecTAccum(w.crossV, &dvc[q * d], &dh[q * d]);
    }

    // encoder backward (residual: dx gets dh)
    for (std::size_t pos = 0; pos < m; ++pos) {
        addOuter(grads.encO, &dh[pos * d], &t.ae[pos * d]);
        std::fill(dac.begin(), dac.end(), 0.0); // reuse as dae
        matVecTAccum(w.encO, &dh[pos * d], dac.data());
        for (std::size_t i = 0; i < d; ++i) dx[pos * d + i] += dh[pos * d + i];

        const double* arow = &t.alphaE[pos * m];
        double dotA = 0.0;
        for (std::size_t q = 0; q < m; ++q) {
            dalpha[q] = dot(dac.data(), &t.ve[q * d], d);
            for (std::size_t i = 0; i < d; ++i) dve[q * d + i] += arow[q] * dac[i];
            dotA += arow[q] * dalpha[q];
        }
        std::fill(dqcl.begin(), dqcl.end(), 0.0); // reuse as dqe
        for (std::size_t q = 0; q < m; ++q) {
            const double ds = invSqrtD * arow[q] * (dalpha[q] - dotA);
            for (std::size_t i = 0; i < d; ++i) {
                dqcl[i] += ds * t.ke[q * d + i];
                dke[q * d + i] += ds * t.qe[pos * d + i];
            }
        }
        addOuter(grads.encQ, dqcl.data(), &t.x[pos * d]);
        matVecTAccum(w.encQ, dqcl.data(), &dx[pos * d]);
    }
    for (std::size_t q = 0; q < m; ++q) {
        addOuter(grads.encK, &dke[q * d], &t.x[q * d]);
        matVecTAccum(w.encK, &dke[q * d], &dx[q * d]);
        addOuter(grads.encV, &dve[q * d], &t.x[q * d]);
        matVecTAccum(w.encV, &dve[q * d], &dx[q * d]);
    }
    for (std::size_t pos = 0; pos < m; ++pos) {
        double* erow = grads.embedding.row(static_cast<std::size_t>(in[pos]));
        for (std::size_t i = 0; i < d; ++i) erow[i] += dx[pos * d + i];
    }
}

std::vector<int> sliceRow(const std::vector<int>& row, std::size_t len) {
    return std::vector<int>(row.begin(), row.begin() + static_cast<long>(len));
}

} // namespace

void ModelConfig::validate() const {
    if (vocabSize < Vocab::kNumSpecials) {
        throw ConfigError("model: vocabSize must cover the special tokens");
    }
    if (embedDim < 2 || embedDim % 2 != 0) {
        throw ConfigError("model: embedDim must be even and >= 2");
    }
    if (hiddenDim == 0) throw ConfigError("model: hiddenDim must be positive");
    if (maxPositions < 2) throw ConfigError("model: maxPositions must be >= 2");
    if (attentionHeads != 1) {
        throw ConfigError("model: only single-head attention is supported");
    }
}

nlohmann::json ModelConfig::toJson() const {
    return {{"vocab_size", vocabSize},     {"embed_dim", embedDim},
            {"hidden_dim", hiddenDim},     {"max_positions", maxPositions},
            {"attention_heads", attentionHeads},
            {"tie_output_embedding", tieOutputEmbedding}};
}

ModelConfig ModelConfig::fromJson(const nlohmann::json& j) {
    ModelConfig c;
    c.vocabSize = j.at("vocab_size").get<std::size_t>();
    c.embedDim = j.at("embed_dim").get<std::size_t>();
    c.hiddenDim = j.at("hidden_dim").get<std::size_t>();
    c.maxPositions = j.at("max_positions").get<std::size_t>();
    c.attentionHeads = j.value("attention_heads", std::size_t{1});
    c.tieOutputEmbedding = j.at("tie_output_embedding").get<bool>();
    c.validate();
    return c;
}

TensorSet zerosLike(const TensorSet& like) {
    TensorSet z;
    z.forEach([&](const char* name, Tensor& t) {
        const_cast<TensorSet&>(like).forEach([&](const char* other, Tensor& src) {
            if (std::string_view(name) == other) t = Tensor(src.rows, src.cols);
        });
    });
    return z;
}

namespace {

Tensor buildPositionTable(const ModelConfig& c) {
    Tensor p(c.maxPositions, c.embedDim);
    for (std::size_t pos = 0; pos < c.maxPositions; ++pos) {
        for (std::size_t i = 0; i < c.embedDim / 2; ++i) {
            const double freq = std::pow(10000.0, -2.0 * static_cast<double>(i)
                                                     / static_cast<double>(c.embedDim));
            const double angle = static_cast<double>(pos) * freq;
            p.at(pos, 2 * i) = std::sin(angle);
            p.at(pos, 2 * i + 1) = std::cos(angle);
        }
    }
    return p;
}

void shapeTensors(TensorSet& t, const ModelConfig& c) {
    const std::size_t d = c.embedDim, h = c.hiddenDim, V = c.vocabSize;
    t.embedding = Tensor(V, d);
    t.encQ = Tensor(d, d); t.encK = Tensor(d, d); t.encV = Tensor(d, d); t.encO = Tensor(d, d);
    t.decQ = Tensor(d, d); t.decK = Tensor(d, d); t.decV = Tensor(d, d); t.decO = Tensor(d, d);
    t.crossQ = Tensor(d, d); t.crossK = Tensor(d, d); t.crossV = Tensor(d, d); t.crossO = Tensor(d, d);
    t.ffnW1 = Tensor(h, d); t.ffnB1 = Tensor(1, h);
    t.ffnW2 = Tensor(d, h); t.ffnB2 = Tensor(1, d);
    t.outProj = c.tieOutputEmbedding ? Tensor() : Tensor(V, d);
}

} // namespace

ModelParams initModel(const ModelConfig& config, Rng& rng) {
    config.validate();
    ModelParams p;
    p.config = config;
    shapeTensors(p.tensors, config);
    p.tensors.forEach([&](const char* name, Tensor& t) {
        if (std::string_view(name).starts_with("ffnB")) return; // biases stay zero
        for (auto& v : t.data) v = rng.uniformReal(-0.08, 0.08);
    });
    p.positions = buildPositionTable(config);
    return p;
}

std::vector<double> forwardLogprobs(const ModelParams& params,
                                    const std::vector<int>& inputIds,
                                    const std::vector<int>& targetIds) {
    ExampleTrace t;
    runForward(params, inputIds, targetIds, t);
    std::vector<double> lp(t.L, 0.0);
    for (std::size_t j = 0; j < t.L; ++j) lp[j] = t.zt[j] - t.logZ[j];
    return lp;
}

namespace {

LossResult batchLossImpl(const ModelParams& params, const Batch& batch,
                         LossNorm norm, TensorSet* grads) {
    if (batch.size() == 0) throw DataError("model: empty batch");
    LossResult res;
    res.exampleCount = batch.size();
    for (std::size_t e = 0; e < batch.size(); ++e) {
        if (batch.targetLengths[e] < 2) {
            throw DataError("model: batch row " + std::to_string(e) + " has no target tokens");
        }
        res.tokenCount += batch.targetLengths[e] - 1;
    }
    const double denom = norm == LossNorm::PerToken
                             ? static_cast<double>(res.tokenCount)
                             : static_cast<double>(res.exampleCount);
    const double wgt = 1.0 / denom;

    ExampleTrace trace;
    for (std::size_t e = 0; e < batch.size(); ++e) {
        const auto in = sliceRow(batch.inputIds[e], batch.inputLengths[e]);
        const auto tgt = sliceRow(batch.targetIds[e], batch.targetLengths[e]);
        runForward(params, in, tgt, trace);
        res.totalNll += traceNll(trace);
        if (grads != nullptr) {
            runBackward(params, in, tgt, trace, wgt, *grads);
        }
    }
    res.loss = res.totalNll * wgt;
    return res;
}

} // namespace

LossResult batchLoss(const ModelParams& params, const Batch& batch, LossNorm norm) {
    return batchLossImpl(params, batch, norm, nullptr);
}

LossResult batchLossGrad(const ModelParams& params, const Batch& batch,
                         LossNorm norm, TensorSet& grads) {
    return batchLossImpl(params, batch, norm, &grads);
}

std::vector<int> greedyDecode(const ModelParams& params,
                              const std::vector<int>& inputIds,
                              std::size_t maxLen) {
    if (inputIds.empty()) throw DataError("model: empty input sequence");
    const std::size_t d = params.config.embedDim;
    const std::size_t hd = params.config.hiddenDim;
    const std::size_t V = params.config.vocabSize;
    const double invSqrtD = 1.0 / std::sqrt(static_cast<double>(d));
    const TensorSet& w = params.tensors;

    // encode once
    const std::size_t m = inputIds.size();
    std::vector<double> x(m * d), qe(m * d), ke(m * d), ve(m * d);
    std::vector<double> h(m * d, 0.0), kc(m * d), vc(m * d);
    for (std::size_t pos = 0; pos < m; ++pos) embedInto(params, inputIds[pos], pos, &x[pos * d]);
    for (std::size_t pos = 0; pos < m; ++pos) {
        matVec(w.encQ, &x[pos * d], &qe[pos * d]);
        matVec(w.encK, &x[pos * d], &ke[pos * d]);
        matVec(w.encV, &x[pos * d], &ve[pos * d]);
    }
    std::vector<double> scores(std::max({m, V, params.config.maxPositions}), 0.0);
    std::vector<double> attn(d, 0.0), oe(d, 0.0);
    for (std::size_t pos = 0; pos < m; ++pos) {
        for (std::size_t q = 0; q < m; ++q) {
            scores[q] = invSqrtD * dot(&qe[pos * d], &ke[q * d], d);
        }
        softmaxInPlace(scores.data(), m);
        std::fill(attn.begin(), attn.end(), 0.0);
        for (std::size_t q = 0; q < m; ++q) {
            for (std::size_t i = 0; i < d; ++i) attn[i] += scores[q] * ve[q * d + i];
        }
        matVec(w.encO, attn.data(), oe.data());
        for (std::size_t i = 0; i < d; ++i) h[pos * d + i] = x[pos * d + i] + oe[i];
    }
    for (std::size_t pos = 0; pos < m; ++pos) {
        matVec(w.crossK, &h[pos * d], &kc[pos * d]);
        matVec(w.crossV, &h[pos * d], &vc[pos * d]);
    }

    // incremental decode with cached prefix keys/values
    std::vector<int> prefix{Vocab::kBos};
    std::vector<double> y, kd, vd; // grows one row per step
    std::vector<double> qrow(d), u(d), cvec(d), g(hd), f(d), pre(hd);
    std::vector<int> emitted;
    while (emitted.size() < maxLen) {
        const std::size_t j = prefix.size() - 1;
        if (j >= params.config.maxPositions) break;
        y.resize((j + 1) * d); kd.resize((j + 1) * d); vd.resize((j + 1) * d);
        embedInto(params, prefix[j], j, &y[j * d]);
        matVec(w.decQ, &y[j * d], qrow.data());
        matVec(w.decK, &y[j * d], &kd[j * d]);
        matVec(w.decV, &y[j * d], &vd[j * d]);

        for (std::size_t q = 0; q <= j; ++q) {
            scores[q] = invSqrtD * dot(qrow.data(), &kd[q * d], d);
        }
        softmaxInPlace(scores.data(), j + 1);
        std::fill(attn.begin(), attn.end(), 0.0);
        for (std::size_t q = 0; q <= j; ++q) {
            for (std::size_t i = 0; i < d; ++i) attn[i] += scores[q] * vd[q * d + i];
        }
        matVec(w.decO, attn.data(), u.data());
        for (std::size_t i = 0; i < d; ++i) u[i] += y[j * d + i];

        matVec(w.crossQ, u.data(), qrow.data());
        for (std::size_t q = 0; q < m; ++q) {
            scores[q] = invSqrtD * dot(qrow.data(), &kc[q * d], d);
        }
        softmaxInPlace(scores.data(), m);
        std::fill(attn.begin(), attn.end(), 0.0);
        for (std::size_t q = 0; q < m; ++q) {
            for (std::size_t i = 0; i < d; ++i) attn[i] += scores[q] * vc[q * d + i];
        }
        matVec(w.crossO, attn.data(), cvec.data());
        for (std::size_t i = 0; i < d; ++i) cvec[i] += u[i];

        matVec(w.ffnW1, cvec.data(), pre.data());
        for (std::size_t i = 0; i < hd; ++i) g[i] = std::tanh(pre[i] + w.ffnB1.data[i]);
        matVec(w.ffnW2, g.data(), f.data());
        for (std::size_t i = 0; i < d; ++i) f[i] += cvec[i] + w.ffnB2.data[i];

        matVec(params.outputMatrix(), f.data(), scores.data());
        std::size_t best = 0;
        for (std::size_t v = 1; v < V; ++v) {
            if (scores[v] > scores[best]) best = v; // strict: ties keep lowest id
        }
        if (static_cast<int>(best) == Vocab::kEos) break;
        emitted.push_back(static_cast<int>(best));
        prefix.push_back(static_cast<int>(best));
    }
    return emitted;
}

nlohmann::json AdamHyper::toJson() const {
    return {{"lr", lr}, {"beta1", beta1}, {"beta2", beta2}, {"eps", eps}};
}

AdamHyper AdamHyper::fromJson(const nlohmann::json& j) {
    AdamHyper h;
    h.lr = j.value("lr", h.lr);
    h.beta1 = j.value("beta1", h.beta1);
    h.beta2 = j.value("beta2", h.beta2);
    h.eps = j.value("eps", h.eps);
    return h;
}

AdamState makeAdamState(const TensorSet& like) {
    AdamState s;
    s.m = zerosLike(like);
    s.v = zerosLike(like);
    s.step = 0;
    return s;
}

void adamStep(TensorSet& params, const TensorSet& grads, AdamState& state,
              const AdamHyper& hyper) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.step));
    params.forEach([&](const char* name, Tensor& p) {
        const Tensor* g = nullptr;
        Tensor* mt = nullptr;
        Tensor* vt = nullptr;
        const_cast<TensorSet&>(grads).forEach([&](const char* n, Tensor& t) {
            if (std::string_view(name) == n) g = &t;
        });
        state.m.forEach([&](const char* n, Tensor& t) {
            if (std::string_view(name) == n) mt = &t;
        });
        state.v.forEach([&](const char* n, Tensor& t) {
            if (std::string_view(name) == n) vt = &t;
        });
        if (g->size() != p.size() || mt->size() != p.size()) {
            throw DataError(std::string("adam: shape mismatch for tensor ") + name);
        }
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = g->data[i];
            if (!std::isfinite(gi)) {
                throw DataError(std::string("adam: non-finite gradient in ") + name);
            }
            mt->data[i] = hyper.beta1 * mt->data[i] + (1.0 - hyper.beta1) * gi;
            vt->data[i] = hyper.beta2 * vt->data[i] + (1.0 - hyper.beta2) * gi * gi;
            const double mhat = mt->data[i] / bc1;
            const double vhat = vt->data[i] / bc2;
            p.data[i] -= hyper.lr * mhat / (std::sqrt(vhat) + hyper.eps);
        }
    });
}

} // namespace polarmin
