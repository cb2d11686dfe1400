#pragma once

// Integer and character arithmetic behind the half-integral weight
// multiplier system.

#include <complex>
#include <cstdint>
#include <vector>

namespace hiw {

using cplx = std::complex<double>;

/// Kronecker symbol (c/d) for odd d, extended to negative d by
/// (c/d) = (c/|d|) for c >= 0 and -(c/|d|) for c < 0; (c/±1) = 1.
int kronecker(std::int64_t c, std::int64_t d);

/// epsilon_d: 1 for d = 1 (mod 4), i for d = 3 (mod 4).
cplx eps_d(std::int64_t d);

/// (c/d) * (-1/d)^k * eps_d: the factor that (c/d)(-4/d)^{k+1/2} contributes
/// to the Poincare and kernel summands. Modulus one.
cplx theta_power_factor(std::int64_t c, std::int64_t d, int k);

/// a' in [0, c) with a a' = 1 (mod c).
std::int64_t mod_inverse(std::int64_t a, std::int64_t c);

/// e^{2 pi i num / den}.
cplx unit_root(std::int64_t num, std::int64_t den);

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t euler_phi(std::int64_t n);
std::vector<std::int64_t> prime_divisors(std::int64_t n);
bool is_prime(std::int64_t n);

/// Dirichlet character stored as exact rational angles: psi(a) = e(angle[a mod q] / order),
/// angle = -1 marks residues not coprime to the modulus.
class DirichletCharacter {
 public:
  DirichletCharacter() = default;
  DirichletCharacter(std::int64_t modulus, int order, std::vector<int> angles,
                     std::vector<int> generator_exponents);

  /// Principal character mod q.
  static DirichletCharacter trivial(std::int64_t modulus);

  std::int64_t modulus() const noexcept { return modulus_; }
  int order() const noexcept { return order_; }
  std::int64_t conductor() const noexcept { return conductor_; }
  bool is_even() const;
  bool is_real() const;
  bool is_trivial() const;
  const std::vector<int>& generator_exponents() const noexcept { return gen_exp_; }

  cplx operator()(std::int64_t a) const;
  cplx conj(std::int64_t a) const { return std::conj((*this)(a)); }

 private:
  std::int64_t modulus_ = 1;
  int order_ = 1;
  std::vector<int> angle_;
  std::vector<int> gen_exp_;
  std::int64_t conductor_ = 1;
};

/// All characters mod `modulus` with psi(-1) = 1; the principal character
/// comes first, the rest in lexicographic order of generator exponents.
std::vector<DirichletCharacter> enumerate_even_characters(std::int64_t modulus);

/// psibar(d) (c/d) (-1/d)^k eps_d for c > 0, 4N | c, gcd(c, d) = 1.
cplx multiplier_nu(std::int64_t c, std::int64_t d, const DirichletCharacter& psi, int k);

/// Sum over units d mod c of nu(c,d) e((m dbar + n d)/c). Direct loop.
cplx kloosterman_theta(std::int64_t m, std::int64_t n, std::int64_t c,
                       const DirichletCharacter& psi, int k);

/// Precomputed units mod c with inverses and multiplier values; one table
/// serves every (m, n) sharing the modulus c.
class KloostermanTable {
 public:
  KloostermanTable(std::int64_t c, const DirichletCharacter& psi, int k);

  std::int64_t modulus() const noexcept { return c_; }
  std::size_t unit_count() const noexcept { return units_.size(); }

  /// Same sum as kloosterman_theta, from the table.
  cplx sum(std::int64_t m, std::int64_t n) const;

  /// K(m, n; c) for every n in [0, c), one FFT. Result index n.
  std::vector<cplx> sums_for_all_n(std::int64_t m) const;

  /// Batched form for several m; only n in [0, count) is returned (count <= 0: all of [0, c)).
  std::vector<std::vector<cplx>> sums_for_all_n(const std::vector<std::int64_t>& ms,
                                                std::int64_t count = 0) const;

 private:
  struct Unit {
    std::int64_t d;
    std::int64_t dbar;
    cplx nu;
  };
  std::int64_t c_;
  std::vector<Unit> units_;
};

}  // namespace hiw
