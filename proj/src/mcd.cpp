#include "multiren/mcd.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "multiren/errors.hpp"

namespace multiren {

namespace {

std::string triple_text(int a, int b, int d) {
  std::ostringstream os;
  os << "(" << a << ", " << b << ", " << d << ")";
  return os.str();
}

}  // namespace

Mcd::Mcd()
    : chains_{{0}},
      critical_{0},
      pi_{0},
      chain_of_{0},
      position_{0},
      is_critical_{1},
      chain_critical_{0} {}

Mcd Mcd::validate(McdFields raw) {
  const int m = raw.elements;
  if (m < 1) throw std::invalid_argument("an m.c.d. needs at least one element");
  if (static_cast<int>(raw.pi.size()) != m)
    throw std::invalid_argument("pi must have exactly one entry per element");
  for (int v : raw.pi)
    if (v < 0 || v >= m) throw std::invalid_argument("pi value out of range: " + std::to_string(v));
  if (raw.critical.empty()) throw std::invalid_argument("critical set is empty");
  std::vector<char> crit(static_cast<std::size_t>(m), 0);
  for (int c : raw.critical) {
    if (c < 0 || c >= m) throw std::invalid_argument("critical element out of range: " + std::to_string(c));
    if (crit[static_cast<std::size_t>(c)])
      throw std::invalid_argument("critical element listed twice: " + std::to_string(c));
    crit[static_cast<std::size_t>(c)] = 1;
  }
  if (raw.marked < 0 || raw.marked >= m || !crit[static_cast<std::size_t>(raw.marked)])
    throw std::invalid_argument("marked element must be critical");

  Mcd s;
  s.chain_of_.assign(static_cast<std::size_t>(m), -1);
  s.position_.assign(static_cast<std::size_t>(m), -1);
  for (std::size_t c = 0; c < raw.chains.size(); ++c) {
    const auto& ch = raw.chains[c];
    if (ch.empty()) throw PartitionError("chain " + std::to_string(c) + " is empty");
    for (std::size_t p = 0; p < ch.size(); ++p) {
      const int e = ch[p];
      if (e < 0 || e >= m) throw PartitionError("chain element out of range: " + std::to_string(e));
      if (s.chain_of_[static_cast<std::size_t>(e)] != -1)
        throw PartitionError("element " + std::to_string(e) + " appears in more than one place");
      s.chain_of_[static_cast<std::size_t>(e)] = static_cast<int>(c);
      s.position_[static_cast<std::size_t>(e)] = static_cast<int>(p);
    }
  }
  for (int e = 0; e < m; ++e)
    if (s.chain_of_[static_cast<std::size_t>(e)] == -1)
      throw PartitionError("element " + std::to_string(e) + " lies in no chain");

  s.chain_critical_.assign(raw.chains.size(), -1);
  for (std::size_t c = 0; c < raw.chains.size(); ++c) {
    int count = 0;
    for (int e : raw.chains[c])
      if (crit[static_cast<std::size_t>(e)]) {
        ++count;
        s.chain_critical_[c] = e;
      }
    if (count != 1)
      throw CriticalCountError("chain " + std::to_string(c) + " holds " + std::to_string(count) +
                               " critical elements");
  }

  s.chains_ = std::move(raw.chains);
  s.pi_ = std::move(raw.pi);
  s.marked_ = raw.marked;
  s.is_critical_ = std::move(crit);
  s.critical_ = std::move(raw.critical);
  std::sort(s.critical_.begin(), s.critical_.end());

  // Folding around each critical element, over every same-side pair.
  for (std::size_t c = 0; c < s.chains_.size(); ++c) {
    const auto& ch = s.chains_[c];
    const int d = s.chain_critical_[c];
    const int pd = s.position(d);
    const int size = static_cast<int>(ch.size());
    for (int i = 0; i < size; ++i) {
      for (int j = i + 1; j < size; ++j) {
        int a;
        int b;
        if (j < pd) {
          a = ch[static_cast<std::size_t>(i)];
          b = ch[static_cast<std::size_t>(j)];
        } else if (i > pd) {
          a = ch[static_cast<std::size_t>(j)];
          b = ch[static_cast<std::size_t>(i)];
        } else {
          continue;
        }
        if (!(s.precedes(s.pi(a), s.pi(b)) && s.precedes(s.pi(b), s.pi(d))))
          throw FoldingError("folding fails on triple " + triple_text(a, b, d));
      }
    }
  }

  std::vector<char> seen(static_cast<std::size_t>(m), 0);
  std::vector<int> stack(s.critical_.begin(), s.critical_.end());
  for (int c : stack) seen[static_cast<std::size_t>(c)] = 1;
  while (!stack.empty()) {
    const int e = stack.back();
    stack.pop_back();
    const int f = s.pi(e);
    if (!seen[static_cast<std::size_t>(f)]) {
      seen[static_cast<std::size_t>(f)] = 1;
      stack.push_back(f);
    }
  }
  for (int e = 0; e < m; ++e)
    if (!seen[static_cast<std::size_t>(e)])
      throw ReachabilityError("element " + std::to_string(e) + " is not in the forward orbit of a critical element");
  return s;
}

McdFields Mcd::fields() const {
  return McdFields{size(), chains_, critical_, pi_, marked_};
}

bool is_transitive(const Mcd& s) {
  int x = s.marked();
  for (int i = 1; i <= s.size(); ++i) {
    x = s.pi(x);
    if (x == s.marked()) return i == s.size();
  }
  return false;
}

bool is_essential(const Mcd& s) {
  const long m = s.size();
  const long limit = m * m;
  auto separated = [&](int x, int y) {
    if (!s.comparable(x, y)) return false;
    const int d = s.critical_of(x);
    const int px = s.position(x);
    const int py = s.position(y);
    const int pd = s.position(d);
    return std::min(px, py) <= pd && pd <= std::max(px, py);
  };
  for (const auto& ch : s.chains()) {
    for (std::size_t p = 0; p + 1 < ch.size(); ++p) {
      int x = ch[p];
      int y = ch[p + 1];
      bool ok = false;
      for (long i = 0; i <= limit; ++i) {
        if (separated(x, y)) {
          ok = true;
          break;
        }
        x = s.pi(x);
        y = s.pi(y);
      }
      if (!ok) return false;
    }
  }
  return true;
}

int first_entry(const Mcd& s, int x) {
  int y = x;
  for (int i = 0; i <= s.size(); ++i) {
    if (s.is_critical(y)) return y;
    y = s.pi(y);
  }
  throw NoEntryError("orbit of " + std::to_string(x) + " never meets the critical set");
}

int first_return(const Mcd& s, int x) { return first_entry(s, s.pi(x)); }

Word element_itinerary(const Mcd& s, int x, int len) {
  Word w;
  int y = x;
  for (int i = 0; i < len; ++i) {
    const int d = s.critical_of(y);
    if (y == d)
      w.push_back(Letter::C);
    else
      w.push_back(s.precedes(d, y) ? Letter::R : Letter::L);
    y = s.pi(y);
  }
  return w;
}

std::vector<int> pi_inverse(const Mcd& s) {
  if (!is_transitive(s)) throw NotTransitiveError("pi is not a single cycle");
  std::vector<int> inv(static_cast<std::size_t>(s.size()));
  for (int e = 0; e < s.size(); ++e) inv[static_cast<std::size_t>(s.pi(e))] = e;
  return inv;
}

int sign_at(const Mcd& s, int x) {
  const auto inv = pi_inverse(s);
  std::vector<char> image_of_critical(static_cast<std::size_t>(s.size()), 0);
  for (int c : s.critical()) image_of_critical[static_cast<std::size_t>(s.pi(c))] = 1;
  int y = x;
  int i = 0;
  while (!image_of_critical[static_cast<std::size_t>(y)]) {
    y = inv[static_cast<std::size_t>(y)];
    ++i;
  }
  return sign_word(element_itinerary(s, y, i));
}

Mcd star_product(const Mcd& sigma1, const Mcd& sigma2) {
  if (!is_transitive(sigma1)) throw NotTransitiveError("outer factor of a product must be transitive");
  if (sigma1.critical_count() != sigma2.critical_count())
    throw CriticalMismatchError("factors have " + std::to_string(sigma1.critical_count()) + " and " +
                                std::to_string(sigma2.critical_count()) + " critical elements");

  // For each critical d of sigma1, the sigma2 chains [pi2^i(c2)] over the
  // indices i with (Pi1 o pi1)^i(c1) = d. The pair sequence is eventually
  // periodic with period at most n * m2, so that many steps see every class.
  std::map<int, std::set<int>> blocks;
  {
    int r = sigma1.marked();
    int y = sigma2.marked();
    const long steps = static_cast<long>(sigma1.critical_count()) * sigma2.size() + sigma1.critical_count() + 1;
    for (long i = 0; i < steps; ++i) {
      blocks[r].insert(sigma2.chain_of(y));
      r = first_return(sigma1, r);
      y = sigma2.pi(y);
    }
  }
  std::map<int, int> block_chain;
  for (int d : sigma1.critical()) {
    auto it = blocks.find(d);
    if (it == blocks.end() || it->second.size() != 1)
      throw NotAdmissibleError("product undefined: critical " + std::to_string(d) +
                               " does not correspond to a single chain of the inner factor");
    block_chain[d] = *it->second.begin();
  }

  // Element ids are assigned in chain order of the result.
  const int m1 = sigma1.size();
  std::vector<int> entry(static_cast<std::size_t>(m1));
  std::vector<int> sign(static_cast<std::size_t>(m1));
  for (int x = 0; x < m1; ++x) {
    entry[static_cast<std::size_t>(x)] = first_entry(sigma1, x);
    sign[static_cast<std::size_t>(x)] = sign_at(sigma1, x);
  }
  std::map<std::pair<int, int>, int> id;
  McdFields out;
  for (const auto& ch1 : sigma1.chains()) {
    std::vector<int> chain;
    for (int x : ch1) {
      std::vector<int> block = sigma2.chain(block_chain[entry[static_cast<std::size_t>(x)]]);
      if (sign[static_cast<std::size_t>(x)] < 0) std::reverse(block.begin(), block.end());
      for (int y : block) {
        const int k = static_cast<int>(id.size());
        id[{x, y}] = k;
        chain.push_back(k);
      }
    }
    out.chains.push_back(std::move(chain));
  }
  out.elements = static_cast<int>(id.size());
  out.pi.assign(id.size(), -1);
  for (const auto& [xy, k] : id) {
    const auto [x, y] = xy;
    const bool crit = sigma1.is_critical(x);
    const std::pair<int, int> target{sigma1.pi(x), crit ? sigma2.pi(y) : y};
    auto it = id.find(target);
    if (it == id.end()) throw NotAdmissibleError("product undefined: image leaves the element set");
    out.pi[static_cast<std::size_t>(k)] = it->second;
    if (crit && sigma2.is_critical(y)) out.critical.push_back(k);
  }
  out.marked = id.at({sigma1.marked(), sigma2.marked()});
  return Mcd::validate(std::move(out));
}

Mcd star_chain(const std::vector<Mcd>& factors) {
  if (factors.empty()) throw std::invalid_argument("empty product");
  Mcd acc = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) acc = star_product(acc, factors[i]);
  return acc;
}

namespace {

// Candidate decomposition with blocks pi^j(B0), B0 a window of `width`
// consecutive elements starting at position `start` of the marked chain.
std::optional<std::pair<Mcd, Mcd>> try_blocks(const Mcd& s, int width, int start) {
  const int m = s.size();
  const int count = m / width;
  const auto& base_chain = s.chain(s.chain_of(s.marked()));
  std::vector<int> block_of(static_cast<std::size_t>(m), -1);
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(count));
  std::vector<int> current(base_chain.begin() + start, base_chain.begin() + start + width);
  for (int j = 0; j < count; ++j) {
    std::sort(current.begin(), current.end(),
              [&](int a, int b) { return s.position(a) < s.position(b); });
    const int ch = s.chain_of(current.front());
    for (std::size_t p = 0; p < current.size(); ++p) {
      const int e = current[p];
      if (s.chain_of(e) != ch) return std::nullopt;
      if (s.position(e) != s.position(current.front()) + static_cast<int>(p)) return std::nullopt;
      if (block_of[static_cast<std::size_t>(e)] != -1) return std::nullopt;
      block_of[static_cast<std::size_t>(e)] = j;
    }
    blocks[static_cast<std::size_t>(j)] = current;
    std::vector<int> next;
    for (int e : current) next.push_back(s.pi(e));
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (static_cast<int>(next.size()) != width) return std::nullopt;
    current = std::move(next);
  }
  {
    std::vector<int> b0 = blocks.front();
    std::sort(b0.begin(), b0.end());
    std::sort(current.begin(), current.end());
    if (current != b0) return std::nullopt;
  }

  McdFields outer;
  outer.elements = count;
  outer.pi.resize(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) outer.pi[static_cast<std::size_t>(j)] = (j + 1) % count;
  for (const auto& ch : s.chains()) {
    std::vector<int> seq;
    for (int e : ch) {
      const int b = block_of[static_cast<std::size_t>(e)];
      if (seq.empty() || seq.back() != b) seq.push_back(b);
    }
    outer.chains.push_back(std::move(seq));
  }
  std::vector<int> critical_block;
  for (int j = 0; j < count; ++j) {
    int crit = 0;
    for (int e : blocks[static_cast<std::size_t>(j)]) crit += s.is_critical(e) ? 1 : 0;
    if (crit > 1) return std::nullopt;
    if (crit == 1) critical_block.push_back(j);
  }
  outer.critical = critical_block;
  outer.marked = 0;
  std::optional<Mcd> sigma1;
  try {
    sigma1 = Mcd::validate(outer);
  } catch (const Error&) {
    return std::nullopt;
  }

  std::vector<int> inner_id(static_cast<std::size_t>(m), -1);
  McdFields inner;
  for (int j : critical_block) {
    std::vector<int> chain;
    auto members = blocks[static_cast<std::size_t>(j)];
    if (sign_at(*sigma1, j) < 0) std::reverse(members.begin(), members.end());
    for (int e : members) {
      inner_id[static_cast<std::size_t>(e)] = inner.elements++;
      chain.push_back(inner_id[static_cast<std::size_t>(e)]);
    }
    inner.chains.push_back(std::move(chain));
  }
  inner.pi.assign(static_cast<std::size_t>(inner.elements), -1);
  for (int j : critical_block) {
    for (int e : blocks[static_cast<std::size_t>(j)]) {
      int f = s.pi(e);
      while (inner_id[static_cast<std::size_t>(f)] == -1) f = s.pi(f);
      inner.pi[static_cast<std::size_t>(inner_id[static_cast<std::size_t>(e)])] =
          inner_id[static_cast<std::size_t>(f)];
      if (s.is_critical(e)) inner.critical.push_back(inner_id[static_cast<std::size_t>(e)]);
    }
  }
  inner.marked = inner_id[static_cast<std::size_t>(s.marked())];
  try {
    Mcd sigma2 = Mcd::validate(inner);
    if (!is_isomorphic(star_product(*sigma1, sigma2), s)) return std::nullopt;
    return std::make_pair(*sigma1, sigma2);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<std::pair<Mcd, Mcd>> find_factorization(const Mcd& s) {
  if (s.size() > kPrimitiveSearchLimit)
    throw SizeLimitError("factor search is limited to " + std::to_string(kPrimitiveSearchLimit) +
                         " elements, got " + std::to_string(s.size()));
  if (!is_transitive(s)) throw NotTransitiveError("factor search needs a transitive m.c.d.");
  const int m = s.size();
  const int n = s.critical_count();
  const auto& base_chain = s.chain(s.chain_of(s.marked()));
  const int marked_pos = s.position(s.marked());
  for (int width = 2; width < m; ++width) {
    if (m % width != 0 || m / width <= n) continue;
    for (int start = std::max(0, marked_pos - width + 1); start <= marked_pos; ++start) {
      if (start + width > static_cast<int>(base_chain.size())) break;
      if (auto w = try_blocks(s, width, start)) return w;
    }
  }
  return std::nullopt;
}

bool is_primitive(const Mcd& s) { return !find_factorization(s).has_value(); }

std::optional<std::vector<int>> find_isomorphism(const Mcd& a, const Mcd& b) {
  if (a.size() != b.size() || a.critical_count() != b.critical_count() ||
      a.chain_count() != b.chain_count())
    return std::nullopt;
  const int m = a.size();

  auto full_check = [&](const std::vector<int>& phi) {
    for (int x = 0; x < m; ++x) {
      const int y = phi[static_cast<std::size_t>(x)];
      if (a.is_critical(x) != b.is_critical(y)) return false;
      if (phi[static_cast<std::size_t>(a.pi(x))] != b.pi(y)) return false;
    }
    for (const auto& ch : a.chains()) {
      const int target = b.chain_of(phi[static_cast<std::size_t>(ch.front())]);
      if (static_cast<int>(b.chain(target).size()) != static_cast<int>(ch.size())) return false;
      for (std::size_t p = 0; p < ch.size(); ++p) {
        const int y = phi[static_cast<std::size_t>(ch[p])];
        if (b.chain_of(y) != target || b.position(y) != static_cast<int>(p)) return false;
      }
    }
    return true;
  };

  // Assign critical images, propagate along pi, backtrack on conflicts.
  std::vector<int> phi(static_cast<std::size_t>(m), -1);
  std::vector<int> used(static_cast<std::size_t>(m), 0);
  std::function<bool(std::size_t)> assign;
  const auto& crit_a = a.critical();
  auto propagate = [&](int x, int y, std::vector<int>& touched) {
    while (true) {
      const int cur = phi[static_cast<std::size_t>(x)];
      if (cur != -1) return cur == y;
      if (used[static_cast<std::size_t>(y)]) return false;
      if (a.is_critical(x) != b.is_critical(y)) return false;
      phi[static_cast<std::size_t>(x)] = y;
      used[static_cast<std::size_t>(y)] = 1;
      touched.push_back(x);
      x = a.pi(x);
      y = b.pi(y);
    }
  };
  auto undo = [&](const std::vector<int>& touched) {
    for (int x : touched) {
      used[static_cast<std::size_t>(phi[static_cast<std::size_t>(x)])] = 0;
      phi[static_cast<std::size_t>(x)] = -1;
    }
  };
  assign = [&](std::size_t idx) -> bool {
    while (idx < crit_a.size() && phi[static_cast<std::size_t>(crit_a[idx])] != -1) ++idx;
    if (idx == crit_a.size()) return full_check(phi);
    const int x = crit_a[idx];
    for (int y : b.critical()) {
      if (used[static_cast<std::size_t>(y)]) continue;
      std::vector<int> touched;
      if (propagate(x, y, touched) && assign(idx + 1)) return true;
      undo(touched);
    }
    return false;
  };
  std::vector<int> touched;
  if (!propagate(a.marked(), b.marked(), touched)) return std::nullopt;
  if (!assign(0)) return std::nullopt;
  return phi;
}

bool is_isomorphic(const Mcd& a, const Mcd& b) { return find_isomorphism(a, b).has_value(); }

bool is_admissible(const Mcd& s, int n) { return s.chain_count() == n && s.critical_count() == n; }

}  // namespace multiren
