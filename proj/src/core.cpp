// core.cpp — dense linear algebra, entropies and divergences
#include "entroprod/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace entroprod::core {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

void require_square(const Mat& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
}

Dims default_dims(const Mat& m) { return Dims{static_cast<int>(m.rows())}; }

void check_dims(const Mat& m, const Dims& dims) {
    if (dims.empty()) throw std::invalid_argument("dims must be non-empty");
    if (dims_product(dims) != m.rows())
        throw std::invalid_argument("product of dims does not match matrix dimension");
}

// Row-major multi-index helpers for tensor factors.
std::vector<int> digits(int idx, const Dims& dims) {
    std::vector<int> out(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    return out;
}

int undigits(const std::vector<int>& dg, const Dims& dims) {
    int idx = 0;
    for (size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + dg[k];
    return idx;
}

}  // namespace

int dims_product(const Dims& d) {
    int p = 1;
    for (int x : d) {
        if (x <= 0) throw std::invalid_argument("dims entries must be positive");
        p *= x;
    }
    return p;
}

void check_hermitian(const Mat& h, double tol) {
    require_square(h, "hermitian");
    double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > tol * scale)
        throw std::invalid_argument("operator is not Hermitian");
}

void check_density(const Mat& rho, double tol) {
    check_hermitian(rho, tol);
    if (std::abs(rho.trace() - cplx(1.0)) > tol)
        throw std::invalid_argument("density operator trace differs from 1");
    RVec w = eigh(rho).values;
    if (w.minCoeff() < -tol) throw std::invalid_argument("density operator has negative eigenvalues");
}

void check_unitary(const Mat& u, double tol) {
    require_square(u, "unitary");
    Mat r = u.adjoint() * u - Mat::Identity(u.rows(), u.cols());
    if (r.cwiseAbs().maxCoeff() > tol) throw std::invalid_argument("operator is not unitary");
}

DensityOperator::DensityOperator(Mat m, Dims dims, double tol) : m_(std::move(m)), dims_(std::move(dims)) {
    check_density(m_, tol);
    check_dims(m_, dims_);
}
DensityOperator::DensityOperator(Mat m, double tol) : DensityOperator(m, default_dims(m), tol) {}

HermitianOperator::HermitianOperator(Mat m, Dims dims, double tol) : m_(std::move(m)), dims_(std::move(dims)) {
    check_hermitian(m_, tol);
    check_dims(m_, dims_);
}
HermitianOperator::HermitianOperator(Mat m, double tol) : HermitianOperator(m, default_dims(m), tol) {}

UnitaryOperator::UnitaryOperator(Mat m, Dims dims, double tol) : m_(std::move(m)), dims_(std::move(dims)) {
    check_unitary(m_, tol);
    check_dims(m_, dims_);
}
UnitaryOperator::UnitaryOperator(Mat m, double tol) : UnitaryOperator(m, default_dims(m), tol) {}

Eigh eigh(const Mat& h) {
    Mat herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(herm);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

CVec general_eigenvalues(const Mat& a) {
    require_square(a, "general_eigenvalues");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    Mat work = a;
    CVec w(n);
    lapack_complex_double dummy;
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(work.data()),
                                    n, reinterpret_cast<lapack_complex_double*>(w.data()), &dummy, 1, &dummy, 1);
    if (info != 0) throw std::runtime_error("general_eigenvalues: zgeev failed");
    return w;
}

Mat herm_fun(const Mat& h, const std::function<double(double)>& f) {
    Eigh e = eigh(h);
    RVec fw = e.values.unaryExpr(f);
    return e.vectors * fw.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

RVec clamped_spectrum(const Mat& rho) {
    RVec w = eigh(rho).values;
    for (int i = 0; i < w.size(); ++i) {
        if (w(i) < -kEigFloor) throw std::invalid_argument("eigenvalue below -1e-12 in state");
        if (w(i) < 0.0) w(i) = 0.0;
    }
    return w;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat kron(const std::vector<Mat>& ops) {
    if (ops.empty()) throw std::invalid_argument("tensor of empty list");
    Mat out = ops.front();
    for (size_t k = 1; k < ops.size(); ++k) out = kron(out, ops[k]);
    return out;
}

Operator tensor(const std::vector<Operator>& ops) {
    if (ops.empty()) throw std::invalid_argument("tensor of empty list");
    Operator out;
    std::vector<Mat> ms;
    for (const auto& o : ops) {
        require_square(o.m, "tensor");
        ms.push_back(o.m);
        Dims d = o.dims.empty() ? default_dims(o.m) : o.dims;
        out.dims.insert(out.dims.end(), d.begin(), d.end());
    }
    out.m = kron(ms);
    return out;
}

Mat identity(int d) { return Mat::Identity(d, d); }

Mat commutator(const Mat& a, const Mat& b) { return a * b - b * a; }

Mat partial_trace(const Mat& rho, const Dims& dims, const std::vector<int>& keep) {
    check_dims(rho, dims);
    const int nf = static_cast<int>(dims.size());
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep must be non-empty");
    std::vector<bool> kept(nf, false);
    for (int k : keep) {
        if (k < 0 || k >= nf) throw std::out_of_range("partial_trace: factor index out of range");
        if (kept[k]) throw std::invalid_argument("partial_trace: repeated factor index");
        kept[k] = true;
    }
    Dims kd, td;
    std::vector<int> kidx, tidx;
    for (int k = 0; k < nf; ++k) {
        if (kept[k]) { kd.push_back(dims[k]); kidx.push_back(k); }
        else { td.push_back(dims[k]); tidx.push_back(k); }
    }
    const int dk = dims_product(kd);
    const int dt = td.empty() ? 1 : dims_product(td);
    Mat out = Mat::Zero(dk, dk);
    std::vector<int> full(nf);
    auto compose = [&](int a, int t) {
        auto da = digits(a, kd);
        auto dtg = td.empty() ? std::vector<int>{} : digits(t, td);
        for (size_t i = 0; i < kidx.size(); ++i) full[kidx[i]] = da[i];
        for (size_t i = 0; i < tidx.size(); ++i) full[tidx[i]] = dtg[i];
        return undigits(full, dims);
    };
    for (int a = 0; a < dk; ++a)
        for (int b = 0; b < dk; ++b) {
            cplx s = 0.0;
            for (int t = 0; t < dt; ++t) s += rho(compose(a, t), compose(b, t));
            out(a, b) = s;
        }
    return out;
}

Mat permute_factors(const Mat& op, const Dims& dims, const std::vector<int>& perm) {
    check_dims(op, dims);
    if (perm.size() != dims.size()) throw std::invalid_argument("permutation size mismatch");
    Dims nd(dims.size());
    for (size_t k = 0; k < perm.size(); ++k) nd[k] = dims[perm[k]];
    const int d = static_cast<int>(op.rows());
    std::vector<int> map(d);
    for (int i = 0; i < d; ++i) {
        auto dg = digits(i, dims);
        std::vector<int> ndg(dims.size());
        for (size_t k = 0; k < perm.size(); ++k) ndg[k] = dg[perm[k]];
        map[i] = undigits(ndg, nd);
    }
    Mat out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(map[i], map[j]) = op(i, j);
    return out;
}

double shannon_entropy(const RVec& p) {
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) s -= xlogx(p(i));
    return s;
}

double von_neumann_entropy(const Mat& rho) {
    check_hermitian(rho, kStateTol);
    return shannon_entropy(clamped_spectrum(rho));
}

double kl_divergence(const RVec& p, const RVec& q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p(i) <= 0.0) continue;
        if (q(i) <= 0.0) return kInf;
        s += p(i) * std::log(p(i) / q(i));
    }
    return s;
}

double relative_entropy(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
        throw std::invalid_argument("relative_entropy: dimension mismatch");
    Eigh es = eigh(sigma);
    const double smax = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    double cross = 0.0;
    double null_overlap = 0.0;
    for (int i = 0; i < es.values.size(); ++i) {
        double w = es.values(i);
        if (w < -kEigFloor) throw std::invalid_argument("relative_entropy: sigma has negative eigenvalues");
        double r = std::real((es.vectors.col(i).adjoint() * rho * es.vectors.col(i))(0, 0));
        if (w <= 1e-14 * smax) {
            null_overlap += std::max(r, 0.0);
        } else {
            cross += r * std::log(w);
        }
    }
    if (null_overlap > kSupportOverlap) return kInf;
    double s = -von_neumann_entropy(rho) - cross;
    return (s < 0.0 && s > -1e-12) ? 0.0 : s;
}

double mutual_information(const Mat& rho, const Dims& dims, const std::vector<int>& part_a) {
    std::vector<int> part_b;
    std::vector<bool> in_a(dims.size(), false);
    for (int k : part_a) {
        if (k < 0 || k >= static_cast<int>(dims.size())) throw std::out_of_range("mutual_information: bad split");
        in_a[k] = true;
    }
    for (int k = 0; k < static_cast<int>(dims.size()); ++k)
        if (!in_a[k]) part_b.push_back(k);
    if (part_a.empty() || part_b.empty()) throw std::invalid_argument("mutual_information: bad split");
    return von_neumann_entropy(partial_trace(rho, dims, part_a)) + von_neumann_entropy(partial_trace(rho, dims, part_b)) -
           von_neumann_entropy(rho);
}

double mutual_information_relent(const Mat& rho, const Dims& dims, const std::vector<int>& part_a) {
    std::vector<int> part_b;
    std::vector<bool> in_a(dims.size(), false);
    for (int k : part_a) in_a.at(k) = true;
    for (int k = 0; k < static_cast<int>(dims.size()); ++k)
        if (!in_a[k]) part_b.push_back(k);
    if (part_a.empty() || part_b.empty()) throw std::invalid_argument("mutual_information: bad split");
    Mat ra = partial_trace(rho, dims, part_a);
    Mat rb = partial_trace(rho, dims, part_b);
    std::vector<int> order = part_a;
    order.insert(order.end(), part_b.begin(), part_b.end());
    Dims nd;
    for (int k : order) nd.push_back(dims[k]);
    Mat reordered = permute_factors(rho, dims, order);
    return relative_entropy(reordered, kron(ra, rb));
}

double renyi_divergence(const RVec& p, const RVec& q, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("renyi_divergence: negative alpha");
    if (p.size() != q.size()) throw std::invalid_argument("renyi_divergence: size mismatch");
    if (alpha == 1.0) return kl_divergence(p, q);
    if (std::isinf(alpha)) {
        double m = 0.0;
        bool any = false;
        for (int i = 0; i < p.size(); ++i) {
            if (p(i) <= 0.0) continue;
            if (q(i) <= 0.0) return kInf;
            m = any ? std::max(m, p(i) / q(i)) : p(i) / q(i);
            any = true;
        }
        return std::log(m);
    }
    if (alpha == 0.0) {
        double s = 0.0;
        for (int i = 0; i < p.size(); ++i)
            if (p(i) > 1e-12) s += q(i);
        return s > 0.0 ? -std::log(s) : kInf;
    }
    double s = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p(i) <= 0.0) continue;
        if (q(i) <= 0.0) {
            if (alpha > 1.0) return kInf;
            continue;
        }
        s += std::pow(p(i), alpha) * std::pow(q(i), 1.0 - alpha);
    }
    return std::log(s) / (alpha - 1.0);
}

double renyi_divergence(const Mat& rho, const Mat& sigma, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("renyi_divergence: negative alpha");
    if (rho.rows() != sigma.rows()) throw std::invalid_argument("renyi_divergence: dimension mismatch");
    if (alpha == 1.0) return relative_entropy(rho, sigma);
    Eigh er = eigh(rho), es = eigh(sigma);
    const double smax = std::max(1.0, es.values.cwiseAbs().maxCoeff());
    const double rmax = std::max(1.0, er.values.cwiseAbs().maxCoeff());
    auto support = [](const Eigh& e, double tol) {
        std::vector<int> idx;
        for (int i = 0; i < e.values.size(); ++i)
            if (e.values(i) > tol) idx.push_back(i);
        return idx;
    };
    auto sup_s = support(es, 1e-14 * smax);
    auto sup_r = support(er, 1e-12 * rmax);
    // Overlap of rho with the null space of sigma.
    double null_overlap = 0.0;
    {
        Mat ps = Mat::Zero(rho.rows(), rho.rows());
        for (int i : sup_s) ps += es.vectors.col(i) * es.vectors.col(i).adjoint();
        null_overlap = std::real((rho - ps * rho * ps).trace());
    }
    if (alpha == 0.0) {
        Mat pr = Mat::Zero(rho.rows(), rho.rows());
        for (int i : sup_r) pr += er.vectors.col(i) * er.vectors.col(i).adjoint();
        double t = std::real((pr * sigma).trace());
        return t > 0.0 ? -std::log(t) : kInf;
    }
    if (std::isinf(alpha)) {
        if (null_overlap > kSupportOverlap) return kInf;
        // ln lambda_max(sigma^{-1/2} rho sigma^{-1/2}) on the support of sigma.
        Mat inv_sqrt = Mat::Zero(rho.rows(), rho.rows());
        for (int i : sup_s) inv_sqrt += (1.0 / std::sqrt(es.values(i))) * es.vectors.col(i) * es.vectors.col(i).adjoint();
        RVec w = eigh(inv_sqrt * rho * inv_sqrt).values;
        return std::log(w.maxCoeff());
    }
    if (alpha > 1.0 && null_overlap > kSupportOverlap) return kInf;
    Mat ra = Mat::Zero(rho.rows(), rho.rows());
    for (int i : sup_r) ra += std::pow(er.values(i), alpha) * er.vectors.col(i) * er.vectors.col(i).adjoint();
    Mat sb = Mat::Zero(rho.rows(), rho.rows());
    for (int i : sup_s) sb += std::pow(es.values(i), 1.0 - alpha) * es.vectors.col(i) * es.vectors.col(i).adjoint();
    double t = std::real((ra * sb).trace());
    if (t <= 0.0) return kInf;
    return std::log(t) / (alpha - 1.0);
}

RVec thermal_populations(const RVec& energies, double beta) {
    if (!std::isfinite(beta) || beta < 0.0) throw std::invalid_argument("thermal state requires finite beta >= 0");
    double emin = energies.minCoeff();
    RVec w = (-(beta) * (energies.array() - emin)).exp().matrix();
    return w / w.sum();
}

Mat thermal_state(const Mat& h, double beta) {
    check_hermitian(h, kStateTol);
    Eigh e = eigh(h);
    RVec p = thermal_populations(e.values, beta);
    return e.vectors * p.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

double free_energy(const Mat& h, double beta) {
    Eigh e = eigh(h);
    double emin = e.values.minCoeff();
    double z = (-(beta) * (e.values.array() - emin)).exp().sum();
    return emin - std::log(z) / beta;
}

double trace_norm(const Mat& a) {
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues().sum();
}

double trace_distance(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("trace_distance: dimension mismatch");
    return 0.5 * eigh(a - b).values.cwiseAbs().sum();
}

double operator_norm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

std::vector<Mat> eigenprojectors(const Mat& h) {
    check_hermitian(h, kStateTol);
    Eigh e = eigh(h);
    const double tol = 1e-9 * std::max(operator_norm(h), 1e-300);
    std::vector<Mat> out;
    int i = 0;
    const int n = static_cast<int>(e.values.size());
    while (i < n) {
        int j = i + 1;
        while (j < n && e.values(j) - e.values(j - 1) <= tol) ++j;
        Mat p = e.vectors.middleCols(i, j - i) * e.vectors.middleCols(i, j - i).adjoint();
        out.push_back(p);
        i = j;
    }
    return out;
}

Mat dephase(const Mat& rho, const Mat& h) {
    if (rho.rows() != h.rows()) throw std::invalid_argument("dephase: dimension mismatch");
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (const Mat& p : eigenprojectors(h)) out += p * rho * p;
    return out;
}

double relative_entropy_of_coherence(const Mat& rho, const Mat& h) {
    return relative_entropy(rho, dephase(rho, h));
}

double expect(const Mat& op, const Mat& rho) { return std::real((op * rho).trace()); }

Mat random_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = cplx(n(rng), n(rng));
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        cplx ph = r(i, i) / std::abs(r(i, i));
        q.col(i) *= ph;
    }
    return q;
}

Mat random_density(int d, std::mt19937_64& rng, int rank) {
    if (rank <= 0) rank = d;
    std::normal_distribution<double> n(0.0, 1.0);
    Mat g(d, rank);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = cplx(n(rng), n(rng));
    Mat rho = g * g.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

Mat random_hermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
    return 0.5 * (g + g.adjoint());
}

Mat expm_hermitian(const Mat& h, cplx factor) {
    Eigh e = eigh(h);
    CVec w(e.values.size());
    for (int i = 0; i < w.size(); ++i) w(i) = std::exp(factor * e.values(i));
    return e.vectors * w.asDiagonal() * e.vectors.adjoint();
}

CVec vec(const Mat& x) { return Eigen::Map<const CVec>(x.data(), x.size()); }

Mat unvec(const CVec& v, int d) { return Eigen::Map<const Mat>(v.data(), d, d); }

Mat sprepost(const Mat& a, const Mat& b) { return kron(Mat(b.transpose()), a); }

Mat superop_of(const std::function<Mat(const Mat&)>& f, int d) {
    Mat s(d * d, d * d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) {
            Mat e = Mat::Zero(d, d);
            e(i, j) = 1.0;
            s.col(i + d * j) = vec(f(e));
        }
    return s;
}

Mat dissipator(const Mat& L) {
    const int d = static_cast<int>(L.rows());
    Mat ld = L.adjoint() * L;
    Mat id = identity(d);
    return sprepost(L, L.adjoint()) - 0.5 * sprepost(ld, id) - 0.5 * sprepost(id, ld);
}

Mat hamiltonian_superop(const Mat& h) {
    Mat id = identity(static_cast<int>(h.rows()));
    return cplx(0, -1) * (sprepost(h, id) - sprepost(id, h));
}

Mat sigma_x() {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = m(1, 0) = 1.0;
    return m;
}

Mat sigma_y() {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = cplx(0, -1);
    m(1, 0) = cplx(0, 1);
    return m;
}

Mat sigma_z() {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

// |0><1|: lowers level 1 to level 0 (level 1 is the excited one for H = diag(0, e)).
Mat sigma_minus() {
    Mat m = Mat::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

Mat destroy(int cut) {
    Mat a = Mat::Zero(cut, cut);
    for (int n = 1; n < cut; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

nlohmann::json to_json(const Mat& m, const Dims& dims) {
    nlohmann::json j;
    j["dims"] = dims.empty() ? Dims{static_cast<int>(m.rows())} : dims;
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int i = 0; i < m.rows(); ++i) {
        std::vector<double> r(m.cols()), c(m.cols());
        for (int k = 0; k < m.cols(); ++k) {
            r[k] = m(i, k).real();
            c[k] = m(i, k).imag();
        }
        re.push_back(r);
        im.push_back(c);
    }
    j["re"] = re;
    j["im"] = im;
    return j;
}

Mat matrix_from_json(const nlohmann::json& j, Dims* dims) {
    if (!j.is_object() || !j.contains("re")) throw std::invalid_argument("matrix JSON requires field 're'");
    const auto& re = j.at("re");
    if (!re.is_array() || re.empty()) throw std::invalid_argument("matrix JSON field 're' must be a non-empty array");
    const int n = static_cast<int>(re.size());
    const int m = static_cast<int>(re[0].size());
    Mat out = Mat::Zero(n, m);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(re[i].size()) != m) throw std::invalid_argument("matrix JSON rows have unequal length");
        for (int k = 0; k < m; ++k) out(i, k) = re[i][k].get<double>();
    }
    if (j.contains("im")) {
        const auto& im = j.at("im");
        if (static_cast<int>(im.size()) != n) throw std::invalid_argument("matrix JSON 'im' shape mismatch");
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(im[i].size()) != m) throw std::invalid_argument("matrix JSON 'im' shape mismatch");
            for (int k = 0; k < m; ++k) out(i, k) += cplx(0.0, im[i][k].get<double>());
        }
    }
    Dims d = j.contains("dims") ? j.at("dims").get<Dims>() : Dims{n};
    if (dims_product(d) != n) throw std::invalid_argument("matrix JSON 'dims' product does not match size");
    if (dims) *dims = d;
    return out;
}

}  // namespace entroprod::core
