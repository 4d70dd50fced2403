#pragma once

#include <Eigen/Dense>

namespace gridreg::eubv {

/// Rows are embeddings / basis vectors throughout this namespace.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Rows whose norm falls below this become the zero-fallback row.
inline constexpr double kZeroNorm = 1e-8;

/// Equiangular unit basis: rows of L2Norm(I - J / n_a). Every row is unit,
/// distinct rows have cosine -1/(n_a - 1), and the rows sum to zero.
class EubvBasis {
public:
    /// Throws InputError if n_a < 2.
    explicit EubvBasis(int n_a);

    int n_a() const noexcept { return static_cast<int>(v_.rows()); }
    int c_v() const noexcept { return static_cast<int>(v_.cols()); }
    const Matrix& v() const noexcept { return v_; }

private:
    Matrix v_;
};

inline EubvBasis make_eubvs(int n_a) { return EubvBasis(n_a); }

struct LossConfig {
    double tau_a = 0.1;    // correlation coefficients
    double tau_b = 0.05;   // cross-modality reconstruction
    double tau_b_j = 0.05; // joint reconstruction
    double tau_c = 0.1;    // contrastive
    double alpha = 0.1;    // negative margin

    /// Throws InputError unless all scales are > 0 and finite.
    void validate() const;
};

/// Row-wise softmax of E V^T / tau_a: N_L x N_A, rows sum to one.
Matrix correlation_coeffs(const Matrix& e, const EubvBasis& basis, double tau_a);

/// Column mean g of `a` (one patch, H_E*W_E x N_A), G = L2Norm(sum_i g_i v_i).
/// Returns the zero vector when |G_raw| < kZeroNorm.
Vector patch_descriptor(const Matrix& a, const EubvBasis& basis);

/// Row k = L2Norm(sum_j B_kj e1_j) with B = softmax over embeddings j of
/// v_k . e2_j / tau_b. N_A x C_V.
Matrix reconstruct_eubvs_cross(const Matrix& e1, const Matrix& e2, const EubvBasis& basis,
                               double tau_b);

/// As reconstruct_eubvs_cross but over the concatenations [e1; e2] (values)
/// and [e2; e1] (coefficients), softmax across all 2 N_L rows.
Matrix reconstruct_eubvs_joint(const Matrix& e1, const Matrix& e2, const EubvBasis& basis,
                               double tau_b_j);

/// Row-wise L2Norm(A V), zero-fallback rows allowed.
Matrix reconstruct_embeddings(const Matrix& a, const EubvBasis& basis);

/// trace(V V_hat^T) = sum_k v_k . v_hat_k.
double basis_alignment(const EubvBasis& basis, const Matrix& v_hat);

/// The four embedding sets fed to the manifold losses. Pairs used:
/// (sar, opt_warped) and (sar_warped, opt).
struct EmbeddingQuad {
    Matrix sar;
    Matrix opt_warped;
    Matrix sar_warped;
    Matrix opt;

    static EmbeddingQuad zeros_like(const EmbeddingQuad& q);
};

/// Cross-modality consistency loss: minus the sum, over both pairs, of the
/// eight alignment terms mixing E and E_hat = reconstruct_embeddings(A(E), V).
/// `grad`, when given, receives dL/dE for each set.
double loss_cross(const EmbeddingQuad& e, const EubvBasis& basis, const LossConfig& cfg,
                  EmbeddingQuad* grad = nullptr);

/// Joint multimodal consistency loss: minus the sum, over both pairs, of the
/// four joint alignment terms (E1|E1_hat, E2|E2_hat).
double loss_joint(const EmbeddingQuad& e, const EubvBasis& basis, const LossConfig& cfg,
                  EmbeddingQuad* grad = nullptr);

/// L_C = sum_i -ln(exp(s_ii / tau_c) / Z_i) where Z_i adds, for each j != i,
/// exp((x + alpha) / tau_c) over x in {gs_j.go_i, go_j.go_i, gs_j.gs_i, go_i.gs_j}.
/// Rows of g_s and g_o must be unit (1e-5) or zero; throws ContractError otherwise.
double contrastive_loss(const Matrix& g_s, const Matrix& g_o, const LossConfig& cfg,
                        Matrix* grad_s = nullptr, Matrix* grad_o = nullptr);

struct TotalLoss {
    double cross = 0.0;
    double joint = 0.0;
    double contrastive = 0.0;
    double total = 0.0;
};

/// L = L_cross + L_joint + L_C. Embedding rows are grouped into patches of
/// `cells_per_patch` consecutive rows; patch descriptors G_S / G_O come from
/// e.sar / e.opt through correlation_coeffs and patch_descriptor.
TotalLoss total_loss(const EmbeddingQuad& e, int cells_per_patch, const EubvBasis& basis,
                     const LossConfig& cfg, EmbeddingQuad* grad = nullptr);

}  // namespace gridreg::eubv
