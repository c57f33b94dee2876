#include "core/gmres.hpp"

#include <cmath>
#include <string>

namespace fmps {

namespace {

// Rotation zeroing b in (a, b): c a + s b = r, -conj(s) a + c b = 0 with real c.
void givens(cplx a, cplx b, double& c, cplx& s) {
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) {
    c = 1.0;
    s = 0.0;
    return;
  }
  if (na == 0.0) {
    c = 0.0;
    s = std::conj(b) / nb;
    return;
  }
  const double norm = std::hypot(na, nb);
  c = na / norm;
  s = (a / na) * std::conj(b) / norm;
}

}  // namespace

GmresResult gmres(const LinearOperator& apply, const Eigen::VectorXcd& b, const GmresOptions& options) {
  if (!(options.tol > 0.0 && options.tol < 1.0)) throw DomainError("gmres: tol must lie in (0, 1)");
  if (options.restart < 1) throw DomainError("gmres: restart must be positive");
  if (options.maxiter < 1) throw DomainError("gmres: maxiter must be positive");

  const Eigen::Index n = b.size();
  GmresResult res;
  res.x = Eigen::VectorXcd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  const int m = options.restart;
  Eigen::MatrixXcd V(n, m + 1);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
  std::vector<double> cs(m);
  std::vector<cplx> sn(m);
  Eigen::VectorXcd g(m + 1);

  Eigen::VectorXcd best = res.x;
  double best_res = 1.0;

  Eigen::VectorXcd r = b;
  while (res.iterations < options.maxiter) {
    const double beta = r.norm();
    if (beta / bnorm <= options.tol) break;
    V.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    H.setZero();

    int k = 0;
    for (; k < m && res.iterations < options.maxiter; ++k) {
      Eigen::VectorXcd w = apply(V.col(k));
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V.col(i).dot(w);
        w -= H(i, k) * V.col(i);
      }
      const double hnext = w.norm();
      H(k + 1, k) = hnext;
      if (hnext > 0.0) V.col(k + 1) = w / hnext;

      for (int i = 0; i < k; ++i) {
        const cplx t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -std::conj(sn[i]) * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      givens(H(k, k), H(k + 1, k), cs[k], sn[k]);
      H(k, k) = cs[k] * H(k, k) + sn[k] * H(k + 1, k);
      H(k + 1, k) = 0.0;
      g[k + 1] = -std::conj(sn[k]) * g[k];
      g[k] = cs[k] * g[k];

      ++res.iterations;
      const double est = std::abs(g[k + 1]) / bnorm;
      res.history.push_back(est);
      if (est <= options.tol || hnext == 0.0) {
        ++k;
        break;
      }
    }

    // Back substitution on the k x k triangle.
    Eigen::VectorXcd y(k);
    for (int i = k - 1; i >= 0; --i) {
      cplx s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
      y[i] = s / H(i, i);
    }
    res.x += V.leftCols(k) * y;
    r = b - apply(res.x);
    const double true_res = r.norm() / bnorm;
    if (true_res < best_res) {
      best_res = true_res;
      best = res.x;
    }
    if (true_res <= options.tol) break;
  }

  res.x = best;
  res.residual = (b - apply(best)).norm() / bnorm;
  res.converged = res.residual <= options.tol;
  return res;
}

}  // namespace fmps
