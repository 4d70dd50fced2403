#include "gridreg/eubv.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "gridreg/error.hpp"

namespace gridreg::eubv {

namespace {

// ---- primitive blocks with their vector-Jacobian products -------------------

Matrix softmax_rows(const Matrix& x, double tau) {
    Matrix y(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double m = x.row(i).maxCoeff();
        y.row(i) = ((x.row(i).array() - m) / tau).exp().matrix();
        y.row(i) /= y.row(i).sum();
    }
    return y;
}

Matrix softmax_rows_backward(const Matrix& y, const Matrix& gy, double tau) {
    const Vector inner = (gy.array() * y.array()).rowwise().sum();
    return (y.array() * (gy.colwise() - inner).array() / tau).matrix();
}

struct Normalized {
    Matrix y;
    Vector norms;
};

Normalized normalize_rows(const Matrix& x) {
    Normalized n{Matrix::Zero(x.rows(), x.cols()), x.rowwise().norm()};
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (n.norms(i) >= kZeroNorm) n.y.row(i) = x.row(i) / n.norms(i);
    }
    return n;
}

Matrix normalize_rows_backward(const Normalized& n, const Matrix& gy) {
    Matrix gx = Matrix::Zero(gy.rows(), gy.cols());
    for (Eigen::Index i = 0; i < gy.rows(); ++i) {
        if (n.norms(i) < kZeroNorm) continue;
        const double proj = n.y.row(i).dot(gy.row(i));
        gx.row(i) = (gy.row(i) - proj * n.y.row(i)) / n.norms(i);
    }
    return gx;
}

// ---- reconstruction of the basis from (values, coefficient source) -----------

struct Reconstruction {
    Matrix w;  // N_A x M, softmax over the M embeddings
    Normalized out;
};

Reconstruction reconstruct(const Matrix& values, const Matrix& coeff_src, const Matrix& v,
                           double tau) {
    Reconstruction rc;
    rc.w = softmax_rows(v * coeff_src.transpose(), tau);
    rc.out = normalize_rows(rc.w * values);
    return rc;
}

void reconstruct_backward(const Reconstruction& rc, const Matrix& values, const Matrix& v,
                          double tau, const Matrix& g_out, Matrix& g_values, Matrix& g_coeff) {
    const Matrix gr = normalize_rows_backward(rc.out, g_out);
    g_values.noalias() += rc.w.transpose() * gr;
    const Matrix gw = gr * values.transpose();
    const Matrix gs = softmax_rows_backward(rc.w, gw, tau);
    g_coeff.noalias() += gs.transpose() * v;
}

// ---- E_hat = L2Norm(A V) ------------------------------------------------------

struct Hat {
    Matrix a;
    Normalized out;
};

Hat hat_forward(const Matrix& e, const Matrix& v, double tau_a) {
    Hat h;
    h.a = softmax_rows(e * v.transpose(), tau_a);
    h.out = normalize_rows(h.a * v);
    return h;
}

Matrix hat_backward(const Hat& h, const Matrix& v, double tau_a, const Matrix& g_hat) {
    const Matrix gp = normalize_rows_backward(h.out, g_hat);
    const Matrix gs = softmax_rows_backward(h.a, gp * v.transpose(), tau_a);
    return gs * v;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    Matrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

void check_quad(const EmbeddingQuad& e, const EubvBasis& basis) {
    const std::array<const Matrix*, 4> sets{&e.sar, &e.opt_warped, &e.sar_warped, &e.opt};
    for (const Matrix* m : sets) {
        if (m->rows() != e.sar.rows() || m->cols() != basis.c_v() || m->rows() < 1) {
            throw DimensionError("embedding sets must share shape N_L x " +
                                 std::to_string(basis.c_v()));
        }
    }
}

// Which two quad members form each pair of the set S.
struct PairRef {
    const Matrix EmbeddingQuad::*first;
    const Matrix EmbeddingQuad::*second;
    Matrix EmbeddingQuad::*grad_first;
    Matrix EmbeddingQuad::*grad_second;
};

constexpr std::array<PairRef, 2> kPairs{{
    {&EmbeddingQuad::sar, &EmbeddingQuad::opt_warped, &EmbeddingQuad::sar,
     &EmbeddingQuad::opt_warped},
    {&EmbeddingQuad::sar_warped, &EmbeddingQuad::opt, &EmbeddingQuad::sar_warped,
     &EmbeddingQuad::opt},
}};

// One argument slot of an alignment term: the matrix and where its gradient goes.
struct Slot {
    const Matrix* m;
    Matrix* g;
};

// grad_s and grad_o are both set or both null.
double contrastive_unchecked(const Matrix& gs, const Matrix& go, const LossConfig& cfg,
                             Matrix* grad_s, Matrix* grad_o) {
    const Eigen::Index b = gs.rows();
    const double tau = cfg.tau_c;
    const Matrix s_so = gs * go.transpose();  // (j, i) = gs_j . go_i
    const Matrix s_oo = go * go.transpose();
    const Matrix s_ss = gs * gs.transpose();
    if (grad_s) *grad_s = Matrix::Zero(gs.rows(), gs.cols());
    if (grad_o) *grad_o = Matrix::Zero(go.rows(), go.cols());

    double loss = 0.0;
    std::vector<double> u;
    for (Eigen::Index i = 0; i < b; ++i) {
        u.clear();
        u.push_back(s_so(i, i) / tau);
        for (Eigen::Index j = 0; j < b; ++j) {
            if (j == i) continue;
            u.push_back((s_so(j, i) + cfg.alpha) / tau);  // gs_j . go_i
            u.push_back((s_oo(j, i) + cfg.alpha) / tau);  // go_j . go_i
            u.push_back((s_ss(j, i) + cfg.alpha) / tau);  // gs_j . gs_i
            u.push_back((s_so(j, i) + cfg.alpha) / tau);  // go_i . gs_j
        }
        double m = u[0];
        for (double x : u) m = std::max(m, x);
        double z = 0.0;
        for (double x : u) z += std::exp(x - m);
        const double lse = m + std::log(z);
        loss += lse - u[0];

        if (!grad_s && !grad_o) continue;
        Matrix& dgs = *grad_s;
        Matrix& dgo = *grad_o;
        const double w0 = (std::exp(u[0] - lse) - 1.0) / tau;
        dgs.row(i) += w0 * go.row(i);
        dgo.row(i) += w0 * gs.row(i);
        std::size_t k = 1;
        for (Eigen::Index j = 0; j < b; ++j) {
            if (j == i) continue;
            const double w1 = std::exp(u[k++] - lse) / tau;
            const double w2 = std::exp(u[k++] - lse) / tau;
            const double w3 = std::exp(u[k++] - lse) / tau;
            const double w4 = std::exp(u[k++] - lse) / tau;
            dgs.row(j) += (w1 + w4) * go.row(i) + w3 * gs.row(i);
            dgo.row(i) += (w1 + w4) * gs.row(j) + w2 * go.row(j);
            dgo.row(j) += w2 * go.row(i);
            dgs.row(i) += w3 * gs.row(j);
        }
    }
    return loss;
}

}  // namespace

// ---------------------------------------------------------------------------

EubvBasis::EubvBasis(int n_a) {
    if (n_a < 2) {
        throw InputError("EUBV basis needs n_a >= 2, got " + std::to_string(n_a));
    }
    const Matrix raw = Matrix::Identity(n_a, n_a) - Matrix::Constant(n_a, n_a, 1.0 / n_a);
    v_ = normalize_rows(raw).y;
}

void LossConfig::validate() const {
    for (double s : {tau_a, tau_b, tau_b_j, tau_c}) {
        if (!(s > 0.0) || !std::isfinite(s)) {
            throw InputError("loss scales must be positive and finite");
        }
    }
    if (!std::isfinite(alpha)) {
        throw InputError("contrastive margin must be finite");
    }
}

Matrix correlation_coeffs(const Matrix& e, const EubvBasis& basis, double tau_a) {
    if (e.cols() != basis.c_v()) {
        throw DimensionError("embedding dimension does not match the basis");
    }
    if (!(tau_a > 0.0)) {
        throw InputError("tau_a must be positive");
    }
    return softmax_rows(e * basis.v().transpose(), tau_a);
}

Vector patch_descriptor(const Matrix& a, const EubvBasis& basis) {
    if (a.cols() != basis.n_a() || a.rows() < 1) {
        throw DimensionError("correlation matrix must be cells x N_A");
    }
    const Matrix g = a.colwise().mean();
    return normalize_rows(g * basis.v()).y.row(0).transpose();
}

Matrix reconstruct_eubvs_cross(const Matrix& e1, const Matrix& e2, const EubvBasis& basis,
                               double tau_b) {
    if (e1.rows() != e2.rows() || e1.cols() != basis.c_v() || e2.cols() != basis.c_v()) {
        throw DimensionError("cross reconstruction needs equally shaped embedding sets");
    }
    return reconstruct(e1, e2, basis.v(), tau_b).out.y;
}

Matrix reconstruct_eubvs_joint(const Matrix& e1, const Matrix& e2, const EubvBasis& basis,
                               double tau_b_j) {
    if (e1.rows() != e2.rows() || e1.cols() != basis.c_v() || e2.cols() != basis.c_v()) {
        throw DimensionError("joint reconstruction needs equally shaped embedding sets");
    }
    return reconstruct(vstack(e1, e2), vstack(e2, e1), basis.v(), tau_b_j).out.y;
}

Matrix reconstruct_embeddings(const Matrix& a, const EubvBasis& basis) {
    if (a.cols() != basis.n_a()) {
        throw DimensionError("correlation matrix must have N_A columns");
    }
    return normalize_rows(a * basis.v()).y;
}

double basis_alignment(const EubvBasis& basis, const Matrix& v_hat) {
    return (basis.v().array() * v_hat.array()).sum();
}

EmbeddingQuad EmbeddingQuad::zeros_like(const EmbeddingQuad& q) {
    return {Matrix::Zero(q.sar.rows(), q.sar.cols()),
            Matrix::Zero(q.opt_warped.rows(), q.opt_warped.cols()),
            Matrix::Zero(q.sar_warped.rows(), q.sar_warped.cols()),
            Matrix::Zero(q.opt.rows(), q.opt.cols())};
}

double loss_cross(const EmbeddingQuad& e, const EubvBasis& basis, const LossConfig& cfg,
                  EmbeddingQuad* grad) {
    cfg.validate();
    check_quad(e, basis);
    const Matrix& v = basis.v();
    const Matrix neg_v = -v;
    if (grad) *grad = EmbeddingQuad::zeros_like(e);

    double loss = 0.0;
    for (const PairRef& pair : kPairs) {
        const Matrix& e1 = e.*pair.first;
        const Matrix& e2 = e.*pair.second;
        const Hat h1 = hat_forward(e1, v, cfg.tau_a);
        const Hat h2 = hat_forward(e2, v, cfg.tau_a);
        Matrix g1 = Matrix::Zero(e1.rows(), e1.cols());
        Matrix g2 = Matrix::Zero(e2.rows(), e2.cols());
        Matrix gh1 = Matrix::Zero(e1.rows(), e1.cols());
        Matrix gh2 = Matrix::Zero(e2.rows(), e2.cols());

        const Slot s1{&e1, &g1}, s2{&e2, &g2}, hat1{&h1.out.y, &gh1}, hat2{&h2.out.y, &gh2};
        const std::array<std::array<Slot, 2>, 8> terms{{
            {s1, s2}, {s2, s1}, {hat1, s2}, {s2, hat1},
            {s1, hat2}, {hat2, s1}, {hat1, hat2}, {hat2, hat1},
        }};
        for (const auto& [values, coeff] : terms) {
            const Reconstruction rc = reconstruct(*values.m, *coeff.m, v, cfg.tau_b);
            loss -= basis_alignment(basis, rc.out.y);
            if (grad) reconstruct_backward(rc, *values.m, v, cfg.tau_b, neg_v, *values.g, *coeff.g);
        }
        if (grad) {
            g1 += hat_backward(h1, v, cfg.tau_a, gh1);
            g2 += hat_backward(h2, v, cfg.tau_a, gh2);
            (*grad).*pair.grad_first += g1;
            (*grad).*pair.grad_second += g2;
        }
    }
    return loss;
}

double loss_joint(const EmbeddingQuad& e, const EubvBasis& basis, const LossConfig& cfg,
                  EmbeddingQuad* grad) {
    cfg.validate();
    check_quad(e, basis);
    const Matrix& v = basis.v();
    const Matrix neg_v = -v;
    if (grad) *grad = EmbeddingQuad::zeros_like(e);

    double loss = 0.0;
    for (const PairRef& pair : kPairs) {
        const Matrix& e1 = e.*pair.first;
        const Matrix& e2 = e.*pair.second;
        const Eigen::Index n = e1.rows();
        const Hat h1 = hat_forward(e1, v, cfg.tau_a);
        const Hat h2 = hat_forward(e2, v, cfg.tau_a);
        Matrix g1 = Matrix::Zero(n, e1.cols());
        Matrix g2 = Matrix::Zero(n, e2.cols());
        Matrix gh1 = Matrix::Zero(n, e1.cols());
        Matrix gh2 = Matrix::Zero(n, e2.cols());

        const Slot s1{&e1, &g1}, s2{&e2, &g2}, hat1{&h1.out.y, &gh1}, hat2{&h2.out.y, &gh2};
        const std::array<std::array<Slot, 2>, 4> terms{{
            {s1, s2}, {hat1, s2}, {s1, hat2}, {hat1, hat2},
        }};
        for (const auto& [first, second] : terms) {
            const Matrix values = vstack(*first.m, *second.m);
            const Matrix coeff = vstack(*second.m, *first.m);
            const Reconstruction rc = reconstruct(values, coeff, v, cfg.tau_b_j);
            loss -= basis_alignment(basis, rc.out.y);
            if (!grad) continue;
            Matrix g_values = Matrix::Zero(values.rows(), values.cols());
            Matrix g_coeff = Matrix::Zero(coeff.rows(), coeff.cols());
            reconstruct_backward(rc, values, v, cfg.tau_b_j, neg_v, g_values, g_coeff);
            *first.g += g_values.topRows(n) + g_coeff.bottomRows(n);
            *second.g += g_values.bottomRows(n) + g_coeff.topRows(n);
        }
        if (grad) {
            g1 += hat_backward(h1, v, cfg.tau_a, gh1);
            g2 += hat_backward(h2, v, cfg.tau_a, gh2);
            (*grad).*pair.grad_first += g1;
            (*grad).*pair.grad_second += g2;
        }
    }
    return loss;
}

double contrastive_loss(const Matrix& g_s, const Matrix& g_o, const LossConfig& cfg,
                        Matrix* grad_s, Matrix* grad_o) {
    cfg.validate();
    if (g_s.rows() < 1 || g_s.rows() != g_o.rows() || g_s.cols() != g_o.cols()) {
        throw DimensionError("contrastive loss needs two B x C descriptor matrices, B >= 1");
    }
    for (const Matrix* m : {&g_s, &g_o}) {
        for (Eigen::Index i = 0; i < m->rows(); ++i) {
            const double n = m->row(i).norm();
            if (std::abs(n - 1.0) > 1e-5 && n != 0.0) {
                throw ContractError("contrastive loss expects unit descriptor rows, row " +
                                    std::to_string(i) + " has norm " + std::to_string(n));
            }
        }
    }
    Matrix gs_local, go_local;
    const bool want = grad_s || grad_o;
    const double loss =
        contrastive_unchecked(g_s, g_o, cfg, want ? &gs_local : nullptr, want ? &go_local : nullptr);
    if (grad_s) *grad_s = std::move(gs_local);
    if (grad_o) *grad_o = std::move(go_local);
    return loss;
}

TotalLoss total_loss(const EmbeddingQuad& e, int cells_per_patch, const EubvBasis& basis,
                     const LossConfig& cfg, EmbeddingQuad* grad) {
    cfg.validate();
    check_quad(e, basis);
    if (cells_per_patch < 1 || e.sar.rows() % cells_per_patch != 0) {
        throw InputError("embedding count must be a multiple of cells_per_patch");
    }
    const Matrix& v = basis.v();
    const Eigen::Index batch = e.sar.rows() / cells_per_patch;

    TotalLoss out;
    EmbeddingQuad g_cross, g_joint;
    out.cross = loss_cross(e, basis, cfg, grad ? &g_cross : nullptr);
    out.joint = loss_joint(e, basis, cfg, grad ? &g_joint : nullptr);

    struct PatchForward {
        Matrix a;
        Normalized g;
    };
    const auto describe = [&](const Matrix& emb, std::vector<PatchForward>& fwd) {
        Matrix descriptors(batch, basis.c_v());
        fwd.resize(batch);
        for (Eigen::Index b = 0; b < batch; ++b) {
            fwd[b].a = softmax_rows(emb.middleRows(b * cells_per_patch, cells_per_patch) *
                                        v.transpose(),
                                    cfg.tau_a);
            fwd[b].g = normalize_rows(fwd[b].a.colwise().mean() * v);
            descriptors.row(b) = fwd[b].g.y.row(0);
        }
        return descriptors;
    };
    std::vector<PatchForward> fwd_s, fwd_o;
    const Matrix gs = describe(e.sar, fwd_s);
    const Matrix go = describe(e.opt, fwd_o);
    Matrix d_gs, d_go;
    out.contrastive = contrastive_unchecked(gs, go, cfg, grad ? &d_gs : nullptr,
                                            grad ? &d_go : nullptr);
    out.total = out.cross + out.joint + out.contrastive;

    if (grad) {
        *grad = EmbeddingQuad::zeros_like(e);
        const auto back = [&](const std::vector<PatchForward>& fwd, const Matrix& d_desc,
                              Matrix& g_emb) {
            for (Eigen::Index b = 0; b < batch; ++b) {
                const Matrix g_raw = normalize_rows_backward(fwd[b].g, d_desc.row(b));
                const Matrix g_mean = g_raw * v.transpose();  // 1 x N_A
                const Matrix g_a =
                    g_mean.replicate(cells_per_patch, 1) / static_cast<double>(cells_per_patch);
                g_emb.middleRows(b * cells_per_patch, cells_per_patch) +=
                    softmax_rows_backward(fwd[b].a, g_a, cfg.tau_a) * v;
            }
        };
        back(fwd_s, d_gs, grad->sar);
        back(fwd_o, d_go, grad->opt);
        grad->sar += g_cross.sar + g_joint.sar;
        grad->opt += g_cross.opt + g_joint.opt;
        grad->sar_warped += g_cross.sar_warped + g_joint.sar_warped;
        grad->opt_warped += g_cross.opt_warped + g_joint.opt_warped;
    }
    return out;
}

}  // namespace gridreg::eubv
