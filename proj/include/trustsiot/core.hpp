#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace trustsiot {

// Dense object index, assigned 0..n-1 at build time. Raw dataset tokens
// (usernames, hashes, sparse ints) live in IdMap only.
using ObjectId = std::uint32_t;

using Timestamp = std::int64_t;

constexpr ObjectId kInvalidObject = std::numeric_limits<ObjectId>::max();

enum class Outcome : std::uint8_t { Negative = 0, Positive = 1 };

struct InteractionRecord {
    ObjectId trustor = kInvalidObject;
    ObjectId trustee = kInvalidObject;
    Timestamp time = 0;
    Outcome outcome = Outcome::Positive;
};

enum class Relation : std::uint8_t { CLOR = 0, POR = 1, OOR = 2, SOR = 3, SOR2 = 4 };

constexpr std::size_t kRelationCount = 5;

const char* relation_name(Relation r);

// Parses exactly CLOR|POR|OOR|SOR|SOR2; throws std::invalid_argument otherwise.
Relation relation_from_name(const std::string& name);

struct RelationTriple {
    ObjectId head = kInvalidObject;
    Relation relation = Relation::CLOR;
    ObjectId tail = kInvalidObject;

    friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
};

enum class TrustLabel : std::uint8_t { Untrustworthy = 0, Neutral = 1, Trustworthy = 2 };

// Numeric encoding used by the MAE/MSE metrics.
inline double label_value(TrustLabel l) {
    return static_cast<double>(static_cast<int>(l)) * 0.5;
}

// Bidirectional map between raw dataset tokens and dense object ids.
class IdMap {
public:
    ObjectId intern(const std::string& token) {
        auto it = index_.find(token);
        if (it != index_.end()) return it->second;
        ObjectId id = static_cast<ObjectId>(tokens_.size());
        tokens_.push_back(token);
        index_.emplace(tokens_.back(), id);
        return id;
    }

    // kInvalidObject when the token was never interned.
    ObjectId lookup(const std::string& token) const {
        auto it = index_.find(token);
        return it == index_.end() ? kInvalidObject : it->second;
    }

    const std::string& token(ObjectId id) const {
        if (id >= tokens_.size()) throw std::out_of_range("IdMap: unknown dense id");
        return tokens_[id];
    }

    std::size_t size() const { return tokens_.size(); }
    bool empty() const { return tokens_.empty(); }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, ObjectId> index_;
};

}  // namespace trustsiot
