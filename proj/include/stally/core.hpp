#ifndef STALLY_CORE_HPP
#define STALLY_CORE_HPP

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stally {

// Hard ceiling on roster size so candidate subsets fit in one 64-bit mask.
inline constexpr int kMaxCandidates = 64;

struct Candidate {
    int id = 0;           // dense index 0..n-1 within one election
    std::string name;
};

// One voter type: a strict weak order given as tiers (earlier tier preferred),
// held `count` times in the profile.
struct Ballot {
    std::vector<std::vector<int>> tiers;
    int count = 1;
};

// Subset of candidate ids as a bitmask. Doubles as the memoization key for
// the subset recursions.
class CandidateSet {
public:
    constexpr CandidateSet() = default;
    explicit constexpr CandidateSet(std::uint64_t bits) : bits_(bits) {}

    static CandidateSet full(int n);
    static CandidateSet of(std::initializer_list<int> ids);
    static CandidateSet of(const std::vector<int>& ids);

    bool contains(int id) const { return (bits_ >> id) & 1u; }
    void add(int id) { bits_ |= std::uint64_t{1} << id; }
    void remove(int id) { bits_ &= ~(std::uint64_t{1} << id); }
    CandidateSet without(int id) const {
        return CandidateSet(bits_ & ~(std::uint64_t{1} << id));
    }

    int size() const { return __builtin_popcountll(bits_); }
    bool empty() const { return bits_ == 0; }
    // Lowest id in the set; only valid when non-empty.
    int lowest() const { return __builtin_ctzll(bits_); }

    std::vector<int> members() const;
    std::uint64_t bits() const { return bits_; }
    std::uint64_t key() const { return bits_; }

    friend bool operator==(CandidateSet a, CandidateSet b) { return a.bits_ == b.bits_; }
    friend bool operator!=(CandidateSet a, CandidateSet b) { return a.bits_ != b.bits_; }
    friend CandidateSet operator&(CandidateSet a, CandidateSet b) {
        return CandidateSet(a.bits_ & b.bits_);
    }

private:
    std::uint64_t bits_ = 0;
};

// Anonymous profile: a roster plus ballot types with multiplicities. Every
// ballot covers the full roster; truncated ballots are completed at
// construction by appending one bottom tier holding all unranked candidates.
struct Profile {
    std::vector<Candidate> roster;
    std::vector<Ballot> ballots;

    // Validates ids/counts/tiers and applies bottom-tier completion.
    static Profile make(std::vector<std::string> names, std::vector<Ballot> raw_ballots);

    int num_candidates() const { return static_cast<int>(roster.size()); }
    long total_voters() const;
    const std::string& name_of(int id) const { return roster.at(id).name; }
};

// Pairwise margin matrix: m(a,b) = net voters preferring a to b. Antisymmetric
// with a zero diagonal by construction.
struct MarginGraph {
    std::vector<std::string> names;
    std::vector<int> m;  // row-major n*n

    MarginGraph() = default;
    MarginGraph(std::vector<std::string> candidate_names, std::vector<int> matrix);
    static MarginGraph zero(std::vector<std::string> candidate_names);

    int n() const { return static_cast<int>(names.size()); }
    int margin(int a, int b) const { return m[static_cast<size_t>(a) * names.size() + b]; }
    int& margin_ref(int a, int b) { return m[static_cast<size_t>(a) * names.size() + b]; }
    const std::string& name_of(int id) const { return names.at(id); }
};

int margin(const Profile& profile, int a, int b);
MarginGraph margin_graph(const Profile& profile);

// Profile with candidate b removed from every ballot; the remaining
// candidates are reindexed densely in their original relative order.
Profile remove_candidate(const Profile& profile, int b);

// Profile restricted to `keep` (same reindexing rule). Voters who ranked no
// surviving candidate end up with a single all-tied tier.
Profile restrict_profile(const Profile& profile, CandidateSet keep);

struct GraphRestriction {
    MarginGraph graph;
    std::vector<int> orig_ids;  // orig_ids[new_id] = id in the parent graph
};
GraphRestriction restrict_graph(const MarginGraph& mg, CandidateSet keep);

// A linear-ballot profile whose margin graph equals `mg` exactly. Requires
// every off-diagonal margin to have the same parity; throws otherwise.
Profile realize_profile(const MarginGraph& mg);

// Map winner ids of a restricted election back to parent ids.
std::vector<int> map_ids(const std::vector<int>& ids, const std::vector<int>& orig_ids);

}  // namespace stally

#endif
