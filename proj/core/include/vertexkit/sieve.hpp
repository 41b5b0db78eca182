#ifndef VERTEXKIT_SIEVE_HPP
#define VERTEXKIT_SIEVE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vertexkit::sieves {

/// Interval partition of {1..n}, stored as the sorted list of block end
/// positions (1-based, last entry always n).
using IntervalPartition = std::vector<std::uint32_t>;

/// Chain of interval partitions E_0 (discrete) .. E_depth (indiscrete), each
/// coarsening the previous. Canonical storage: for every cut position
/// c in 1..n-1, vanish[c-1] is the first level at which the cut is gone
/// (1 <= vanish <= depth). This encodes the chain bijectively, which is what
/// makes the count d^(n-1) transparent.
struct Sieve {
  std::uint32_t width = 1;
  std::uint32_t depth = 1;
  std::vector<std::uint32_t> vanish;  // size width-1

  bool valid() const;
  /// Partition E_m for 0 <= m <= depth.
  IntervalPartition level(std::uint32_t m) const;
  /// Distinct levels in coarsening order (consecutive repeats collapsed).
  std::vector<IntervalPartition> reduced_chain() const;

  bool operator==(const Sieve& o) const = default;
  bool operator<(const Sieve& o) const {
    if (width != o.width) return width < o.width;
    if (depth != o.depth) return depth < o.depth;
    return vanish < o.vanish;
  }
};

/// All sieves of width n and depth d; exhaustive and duplicate-free, with
/// |result| = d^(n-1).
std::vector<Sieve> sieve_enumerate(std::uint32_t n, std::uint32_t d);

/// p <= q iff every distinct level of p occurs among q's levels (q refines p,
/// i.e. q expands further). Antisymmetric on reduced chains.
bool sieve_le(const Sieve& p, const Sieve& q);

/// Graft the sieves ps side by side, then q on top: the i-th innermost pair
/// of q is replaced by ps[i]. All ps must share one depth.
Sieve sieve_compose(const Sieve& q, const std::vector<Sieve>& ps);

/// Canonical parenthesis form: blobs for the E_0 singletons, one explicit
/// pair per class of E_1..E_{depth-1}, outermost (root) pair omitted.
/// Bijective with the chain at fixed width and depth.
std::string render_full(const Sieve& s);

/// Paper-style abbreviated form: like render_full but single-child pairs are
/// spliced out, e.g. the depth-3 six-point example prints
/// "(***)(*(**))" with * rendered as a bullet.
std::string render_display(const Sieve& s);

/// Parse a parenthesis form (canonical or abbreviated, optional extra outer
/// pair) back to the sieve of the given depth. Throws on malformed input or
/// when the string does not determine a sieve of that depth.
Sieve parse_sieve(const std::string& text, std::uint32_t depth);

/// Nesting data extracted from a sieve: the total magnitude ranking of the
/// point variables (outermost/largest first). Leaves that merge early sit
/// inside; at each junction the smaller block is the outer one (the paper
/// centers the bulkier block at the origin), ties broken left-to-right so
/// that a product read left to right has its leftmost variable outermost.
struct ExpansionOrder {
  std::uint32_t width = 1;
  std::vector<std::uint32_t> ranking;  // point indices, outermost first
  std::optional<Sieve> source;

  /// rank position of a point: 0 = outermost/largest
  std::uint32_t rank_of(std::uint32_t point) const;
  /// true if a is further out (larger) than b
  bool outer_than(std::uint32_t a, std::uint32_t b) const {
    return rank_of(a) < rank_of(b);
  }
  static ExpansionOrder from_ranking(std::vector<std::uint32_t> ranking_outermost_first);
};

ExpansionOrder sieve_expansion_order(const Sieve& p);

}  // namespace vertexkit::sieves

#endif
