#include "hiw/arith.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hiw/error.hpp"

namespace hiw {

namespace {

std::int64_t mod_pos(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Jacobi symbol (a/n) for odd n > 0.
int jacobi(std::int64_t a, std::int64_t n) {
  a = mod_pos(a, n);
  int result = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      std::int64_t r = n % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m) {
  std::int64_t r = 1 % m;
  b = mod_pos(b, m);
  while (e > 0) {
    if (e & 1) r = static_cast<std::int64_t>((__int128)r * b % m);
    b = static_cast<std::int64_t>((__int128)b * b % m);
    e >>= 1;
  }
  return r;
}

std::int64_t multiplicative_order(std::int64_t g, std::int64_t m) {
  std::int64_t x = mod_pos(g, m);
  std::int64_t ord = 1;
  while (x != 1 % m) {
    x = x * mod_pos(g, m) % m;
    ++ord;
  }
  return ord;
}

// CRT lift: x = r (mod m_i) and x = 1 (mod q / m_i).
std::int64_t crt_lift(std::int64_t r, std::int64_t mi, std::int64_t q) {
  const std::int64_t rest = q / mi;
  // x = 1 + rest * t, need 1 + rest*t = r (mod mi)
  const std::int64_t inv = mod_inverse(rest % mi == 0 ? 1 : rest, mi);
  const std::int64_t t = mod_pos((r - 1) * inv, mi);
  return mod_pos(1 + rest * t, q);
}

}  // namespace

cplx unit_root(std::int64_t num, std::int64_t den) {
  const double t = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
  return {std::cos(t), std::sin(t)};
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b);
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t p = 2; p * p <= n; ++p)
    if (n % p == 0) return false;
  return true;
}

std::vector<std::int64_t> prime_divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

std::int64_t euler_phi(std::int64_t n) {
  std::int64_t r = n;
  for (auto p : prime_divisors(n)) r = r / p * (p - 1);
  return r;
}

int kronecker(std::int64_t c, std::int64_t d) {
  if (d == 0 || d % 2 == 0) fail(ErrorKind::InvalidArgument, "kronecker: d must be odd and nonzero");
  const std::int64_t ad = d < 0 ? -d : d;
  int r = ad == 1 ? 1 : jacobi(c, ad);
  if (d < 0 && c < 0) r = -r;
  return r;
}

cplx eps_d(std::int64_t d) {
  if (d % 2 == 0) fail(ErrorKind::InvalidArgument, "eps_d: d must be odd");
  return mod_pos(d, 4) == 1 ? cplx{1.0, 0.0} : cplx{0.0, 1.0};
}

cplx theta_power_factor(std::int64_t c, std::int64_t d, int k) {
  const int sym = kronecker(c, d);
  const int minus_one = kronecker(-1, d);
  const int sign = (k % 2 == 0 || minus_one == 1) ? 1 : -1;
  return static_cast<double>(sym * sign) * eps_d(d);
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t c) {
  if (c <= 0) fail(ErrorKind::InvalidArgument, "mod_inverse: modulus must be positive");
  if (gcd64(a, c) != 1) fail(ErrorKind::InvalidArgument, "mod_inverse: gcd(a, c) != 1");
  if (c == 1) return 0;
  std::int64_t r0 = c, r1 = mod_pos(a, c), s0 = 0, s1 = 1;
  while (r1 != 0) {
    const std::int64_t q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
  }
  return mod_pos(s0, c);
}

// ---------------------------------------------------------------------------

DirichletCharacter::DirichletCharacter(std::int64_t modulus, int order, std::vector<int> angles,
                                       std::vector<int> generator_exponents)
    : modulus_(modulus), order_(order), angle_(std::move(angles)),
      gen_exp_(std::move(generator_exponents)) {
  // conductor: least f | q such that psi is trivial on units = 1 (mod f)
  for (std::int64_t f = 1; f <= modulus_; ++f) {
    if (modulus_ % f != 0) continue;
    bool trivial_on_kernel = true;
    for (std::int64_t a = 1; a < modulus_ && trivial_on_kernel; ++a) {
      if (angle_[a] < 0 || (a - 1) % f != 0) continue;
      if (angle_[a] % order_ != 0) trivial_on_kernel = false;
    }
    if (trivial_on_kernel) {
      conductor_ = f;
      break;
    }
  }
}

DirichletCharacter DirichletCharacter::trivial(std::int64_t modulus) {
  std::vector<int> ang(modulus);
  for (std::int64_t a = 0; a < modulus; ++a) ang[a] = gcd64(a, modulus) == 1 ? 0 : -1;
  if (modulus == 1) ang[0] = 0;
  return DirichletCharacter(modulus, 1, std::move(ang), {});
}

cplx DirichletCharacter::operator()(std::int64_t a) const {
  const int ang = angle_[mod_pos(a, modulus_)];
  if (ang < 0) return {0.0, 0.0};
  if (order_ <= 2) return {ang == 0 ? 1.0 : -1.0, 0.0};
  return unit_root(ang, order_);
}

bool DirichletCharacter::is_even() const { return angle_[mod_pos(-1, modulus_)] == 0; }

bool DirichletCharacter::is_real() const {
  return std::all_of(angle_.begin(), angle_.end(),
                     [&](int a) { return a < 0 || (2 * a) % order_ == 0; });
}

bool DirichletCharacter::is_trivial() const {
  return std::all_of(angle_.begin(), angle_.end(), [](int a) { return a <= 0; });
}

std::vector<DirichletCharacter> enumerate_even_characters(std::int64_t q) {
  if (q <= 0 || q % 4 != 0) fail(ErrorKind::InvalidArgument, "modulus must be a positive multiple of 4");

  // generators of (Z/q)^*: lifted local generators of each prime-power factor
  std::vector<std::int64_t> gens, ords;
  for (auto p : prime_divisors(q)) {
    std::int64_t pe = 1;
    int e = 0;
    while (q % (pe * p) == 0) {
      pe *= p;
      ++e;
    }
    if (p == 2) {
      if (e >= 2) {
        gens.push_back(crt_lift(pe - 1, pe, q));
        ords.push_back(2);
      }
      if (e >= 3) {
        gens.push_back(crt_lift(5, pe, q));
        ords.push_back(pe / 4);
      }
    } else {
      const std::int64_t group = pe / p * (p - 1);
      std::int64_t g = 2;
      while (multiplicative_order(g, pe) != group) ++g;
      gens.push_back(crt_lift(g, pe, q));
      ords.push_back(group);
    }
  }

  long order = 1;
  for (auto o : ords) order = std::lcm(order, static_cast<long>(o));

  // discrete logs of every unit with respect to the generators
  std::vector<std::vector<int>> dlog(q);
  std::vector<int> expo(gens.size(), 0);
  while (true) {
    std::int64_t x = 1 % q;
    for (std::size_t i = 0; i < gens.size(); ++i)
      x = static_cast<std::int64_t>((__int128)x * powmod(gens[i], expo[i], q) % q);
    dlog[x] = expo;
    std::size_t i = 0;
    while (i < gens.size() && ++expo[i] == ords[i]) expo[i++] = 0;
    if (i == gens.size()) break;
  }

  std::vector<DirichletCharacter> out;
  std::vector<int> t(gens.size(), 0);
  while (true) {
    std::vector<int> ang(q, -1);
    for (std::int64_t a = 0; a < q; ++a) {
      if (gcd64(a, q) != 1) continue;
      long num = 0;
      for (std::size_t i = 0; i < gens.size(); ++i)
        num += static_cast<long>(t[i]) * dlog[a][i] * (order / ords[i]);
      ang[a] = static_cast<int>(num % order);
    }
    if (ang[q - 1] == 0) out.emplace_back(q, static_cast<int>(order), std::move(ang), t);
    std::size_t i = 0;
    while (i < gens.size() && ++t[i] == ords[i]) t[i++] = 0;
    if (i == gens.size()) break;
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.is_trivial() && !b.is_trivial();
  });
  return out;
}

cplx multiplier_nu(std::int64_t c, std::int64_t d, const DirichletCharacter& psi, int k) {
  return psi.conj(d) * theta_power_factor(c, d, k);
}

cplx kloosterman_theta(std::int64_t m, std::int64_t n, std::int64_t c,
                       const DirichletCharacter& psi, int k) {
  if (c <= 0 || c % psi.modulus() != 0)
    fail(ErrorKind::InvalidArgument, "kloosterman_theta: c must be a positive multiple of 4N");
  cplx total{0.0, 0.0};
  for (std::int64_t d = 1; d < c; ++d) {
    if (gcd64(d, c) != 1) continue;
    const std::int64_t dbar = mod_inverse(d, c);
    const std::int64_t phase = mod_pos((__int128)m * dbar % c + (__int128)n * d % c, c);
    total += multiplier_nu(c, d, psi, k) * unit_root(phase, c);
  }
  return total;
}

KloostermanTable::KloostermanTable(std::int64_t c, const DirichletCharacter& psi, int k) : c_(c) {
  if (c <= 0 || c % psi.modulus() != 0)
    fail(ErrorKind::InvalidArgument, "KloostermanTable: c must be a positive multiple of 4N");
  for (std::int64_t d = 1; d < c; ++d) {
    if (gcd64(d, c) != 1) continue;
    units_.push_back({d, mod_inverse(d, c), multiplier_nu(c, d, psi, k)});
  }
}

cplx KloostermanTable::sum(std::int64_t m, std::int64_t n) const {
  cplx total{0.0, 0.0};
  const std::int64_t mm = mod_pos(m, c_), nn = mod_pos(n, c_);
  for (const auto& u : units_) {
    const std::int64_t phase = (mm * u.dbar + nn * u.d) % c_;
    total += u.nu * unit_root(phase, c_);
  }
  return total;
}

std::vector<cplx> KloostermanTable::sums_for_all_n(std::int64_t m) const {
  return sums_for_all_n(std::vector<std::int64_t>{m}).front();
}

namespace {

// Power-of-two FFTW plans, created once per size and reused for every modulus.
struct PlanCache {
  struct Entry {
    fftw_complex* buf;
    fftw_plan fwd;
    fftw_plan bwd;
  };
  std::vector<std::pair<int, Entry>> entries;
  Entry& get(int size) {
    for (auto& e : entries)
      if (e.first == size) return e.second;
    auto* buf = reinterpret_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size));
    Entry e{buf, fftw_plan_dft_1d(size, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE),
            fftw_plan_dft_1d(size, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE)};
    entries.emplace_back(size, e);
    return entries.back().second;
  }
  ~PlanCache() {
    for (auto& e : entries) {
      fftw_destroy_plan(e.second.fwd);
      fftw_destroy_plan(e.second.bwd);
      fftw_free(e.second.buf);
    }
  }
};

PlanCache& plan_cache() {
  thread_local PlanCache cache;
  return cache;
}

}  // namespace

std::vector<std::vector<cplx>> KloostermanTable::sums_for_all_n(
    const std::vector<std::int64_t>& ms, std::int64_t count) const {
  // Bluestein: e(nd/c) = W_n W_d conj(W_{n-d}) with W_j = exp(pi i j^2 / c)
  const std::int64_t c = c_;
  const std::int64_t nout = count <= 0 ? c : std::min(count, c);
  int L = 1;
  while (L < c + nout) L <<= 1;

  const double direct_cost = static_cast<double>(units_.size()) * static_cast<double>(nout);
  const double fft_cost = 6.0 * L * std::log2(static_cast<double>(L)) + 2.0 * units_.size();
  if (direct_cost < fft_cost) {
    std::vector<cplx> roots(c);
    for (std::int64_t j = 0; j < c; ++j) roots[j] = unit_root(j, c);
    std::vector<std::vector<cplx>> out;
    out.reserve(ms.size());
    for (const std::int64_t m : ms) {
      std::vector<cplx> row(nout, 0.0);
      const std::int64_t mm = mod_pos(m, c);
      for (const auto& u : units_) {
        const cplx base = u.nu * roots[mm * u.dbar % c];
        std::int64_t ph = 0;
        for (std::int64_t n = 0; n < nout; ++n) {
          row[n] += base * roots[ph];
          ph += u.d;
          if (ph >= c) ph -= c;
        }
      }
      out.push_back(std::move(row));
    }
    return out;
  }
  auto chirp = [c](std::int64_t j) {
    const std::int64_t r = mod_pos((__int128)j * j % (2 * c), 2 * c);
    return unit_root(r, 2 * c);
  };
  std::vector<cplx> W(std::max(c, nout));
  for (std::int64_t j = 0; j < static_cast<std::int64_t>(W.size()); ++j) W[j] = chirp(j);

  PlanCache::Entry& plan = plan_cache().get(L);
  auto* buf = plan.buf;
  auto clear = [&] { std::fill(&buf[0][0], &buf[0][0] + 2 * L, 0.0); };

  // transformed kernel b_j = conj(W_j), j in (-c, nout)
  clear();
  for (std::int64_t j = 0; j < nout; ++j) {
    const cplx v = std::conj(W[j]);
    buf[j][0] = v.real();
    buf[j][1] = v.imag();
  }
  for (std::int64_t j = 1; j < c; ++j) {
    const cplx v = std::conj(W[j]);
    buf[L - j][0] = v.real();
    buf[L - j][1] = v.imag();
  }
  fftw_execute(plan.fwd);
  std::vector<cplx> kernel(L);
  for (int i = 0; i < L; ++i) kernel[i] = {buf[i][0], buf[i][1]};

  std::vector<std::vector<cplx>> out;
  out.reserve(ms.size());
  for (const std::int64_t m : ms) {
    clear();
    const std::int64_t mm = mod_pos(m, c);
    for (const auto& u : units_) {
      const cplx v = u.nu * unit_root(mm * u.dbar % c, c) * W[u.d];
      buf[u.d][0] = v.real();
      buf[u.d][1] = v.imag();
    }
    fftw_execute(plan.fwd);
    for (int i = 0; i < L; ++i) {
      const cplx v = cplx(buf[i][0], buf[i][1]) * kernel[i];
      buf[i][0] = v.real();
      buf[i][1] = v.imag();
    }
    fftw_execute(plan.bwd);
    std::vector<cplx> row(nout);
    const double inv = 1.0 / L;
    for (std::int64_t n = 0; n < nout; ++n) row[n] = W[n] * cplx(buf[n][0], buf[n][1]) * inv;
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace hiw
