#pragma once

// Dense two-phase simplex for: maximise c.x subject to A x <= b, x >= 0.
// Small problems only; Bland's rule avoids cycling.

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

class Simplex {
public:
    Simplex(const std::vector<std::vector<double>>& a, const std::vector<double>& b, const std::vector<double>& c)
        : m_(b.size()), n_(c.size()), t_(m_ + 2, std::vector<double>(n_ + 2, 0.0)), basis_(m_), nonbasis_(n_ + 1) {
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                t_[i][j] = a[i][j];
            }
        }
        for (std::size_t i = 0; i < m_; ++i) {
            basis_[i] = static_cast<long>(n_ + i);
            t_[i][n_] = -1.0;
            t_[i][n_ + 1] = b[i];
        }
        for (std::size_t j = 0; j < n_; ++j) {
            nonbasis_[j] = static_cast<long>(j);
            t_[m_][j] = -c[j];
        }
        nonbasis_[n_] = -1;
        t_[m_ + 1][n_] = 1.0;
    }

    // Returns +inf when unbounded, NaN when infeasible.
    double solve(std::vector<double>& x) {
        std::size_t r = 0;
        for (std::size_t i = 1; i < m_; ++i) {
            if (t_[i][n_ + 1] < t_[r][n_ + 1]) {
                r = i;
            }
        }
        if (m_ > 0 && t_[r][n_ + 1] < -kEps) {
            pivot(r, n_);
            if (!run(1) || t_[m_ + 1][n_ + 1] < -kEps) {
                return std::numeric_limits<double>::quiet_NaN();
            }
            for (std::size_t i = 0; i < m_; ++i) {
                if (basis_[i] == -1) {
                    std::size_t s = 0;
                    for (std::size_t j = 1; j <= n_; ++j) {
                        if (better(j, s, i)) {
                            s = j;
                        }
                    }
                    pivot(i, s);
                }
            }
        }
        if (!run(2)) {
            return std::numeric_limits<double>::infinity();
        }
        x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_) {
                x[static_cast<std::size_t>(basis_[i])] = t_[i][n_ + 1];
            }
        }
        return t_[m_][n_ + 1];
    }

private:
    static constexpr double kEps = 1e-12;

    bool better(std::size_t j, std::size_t s, std::size_t row) const {
        const double a = t_[row][j];
        const double b = t_[row][s];
        return a < b || (a == b && nonbasis_[j] < nonbasis_[s]);
    }

    void pivot(std::size_t r, std::size_t s) {
        const double inv = 1.0 / t_[r][s];
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i == r) {
                continue;
            }
            for (std::size_t j = 0; j < n_ + 2; ++j) {
                if (j != s) {
                    t_[i][j] -= t_[r][j] * t_[i][s] * inv;
                }
            }
        }
        for (std::size_t j = 0; j < n_ + 2; ++j) {
            if (j != s) {
                t_[r][j] *= inv;
            }
        }
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i != r) {
                t_[i][s] *= -inv;
            }
        }
        t_[r][s] = inv;
        std::swap(basis_[r], nonbasis_[s]);
    }

    bool run(int phase) {
        const std::size_t x = phase == 1 ? m_ + 1 : m_;
        while (true) {
            long s = -1;
            for (std::size_t j = 0; j <= n_; ++j) {
                if (phase == 2 && nonbasis_[j] == -1) {
                    continue;
                }
                if (s == -1 || t_[x][j] < t_[x][static_cast<std::size_t>(s)] ||
                    (t_[x][j] == t_[x][static_cast<std::size_t>(s)] && nonbasis_[j] < nonbasis_[static_cast<std::size_t>(s)])) {
                    s = static_cast<long>(j);
                }
            }
            if (t_[x][static_cast<std::size_t>(s)] > -kEps) {
                return true;
            }
            const auto sc = static_cast<std::size_t>(s);
            long r = -1;
            for (std::size_t i = 0; i < m_; ++i) {
                if (t_[i][sc] < kEps) {
                    continue;
                }
                if (r == -1) {
                    r = static_cast<long>(i);
                    continue;
                }
                const auto rr = static_cast<std::size_t>(r);
                const double lhs = t_[i][n_ + 1] / t_[i][sc];
                const double rhs = t_[rr][n_ + 1] / t_[rr][sc];
                if (lhs < rhs || (lhs == rhs && basis_[i] < basis_[rr])) {
                    r = static_cast<long>(i);
                }
            }
            if (r == -1) {
                return false;
            }
            pivot(static_cast<std::size_t>(r), sc);
        }
    }

    std::size_t m_;
    std::size_t n_;
    std::vector<std::vector<double>> t_;
    std::vector<long> basis_;
    std::vector<long> nonbasis_;
};

} // namespace oracle
