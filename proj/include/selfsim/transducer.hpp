/**
 * @file transducer.hpp
 * @brief Letter-to-letter Mealy transducers, signed state words and their
 *        action on finite words and eventually periodic rays.
 *
 * A transducer has a finite alphabet, a finite state set with one
 * distinguished identity state, and per-state partial transition maps
 * letter -> (output letter, next state).  A group element is a word of
 * signed states (sign -1 stands for the formal inverse); the rightmost
 * component acts first.  Identity components are dropped eagerly, so the
 * length of an element can only shrink under restriction.
 */
#ifndef SELFSIM_TRANSDUCER_HPP
#define SELFSIM_TRANSDUCER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace selfsim {

using json = nlohmann::json;

/** @brief Error with a machine-readable code and a human-readable detail. */
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string detail)
        : std::runtime_error(code + ": " + detail),
          code_(std::move(code)), detail_(std::move(detail)) {}
    const std::string& code() const { return code_; }
    const std::string& detail() const { return detail_; }
    json to_json() const { return json{{"error", code_}, {"detail", detail_}}; }

private:
    std::string code_;
    std::string detail_;
};

/** @brief One transducer state: name, invertibility flag, partial transitions. */
struct State {
    std::string name;
    bool invertible = true;
    /// transitions[letter] = (output letter, next state), or nullopt if undefined.
    std::vector<std::optional<std::pair<int, int>>> transitions;
};

/** @brief A signed state: (state index, sign in {+1,-1}). */
using SignedState = std::pair<int, int>;

/** @brief A group element as a word of signed states; rightmost acts first. */
using Element = std::vector<SignedState>;

/** @brief Mealy transducer with a distinguished identity state. */
struct Transducer {
    std::vector<std::string> alphabet;
    std::vector<State> states;
    int identity = 0;
    std::vector<int> generators;

    int letter_index(const std::string& s) const;
    int state_index(const std::string& s) const;

    /** @brief Throws Error("BadInput", ...) when structurally inconsistent. */
    void validate() const;

    static Transducer from_json(const json& j);
    json to_json() const;

    /** @brief Parse a signed state word from tokens such as "t" or "t^-1". */
    Element parse_element(const std::vector<std::string>& tokens) const;
    std::string render_element(const Element& e) const;
};

/** @brief Eventually periodic right-infinite word: preperiod then period repeated. */
struct Ray {
    std::vector<int> preperiod;
    std::vector<int> period;

    bool operator==(const Ray& o) const = default;
    bool operator<(const Ray& o) const {
        return std::tie(preperiod, period) < std::tie(o.preperiod, o.period);
    }
};

/** @brief Reduce the period to its primitive root and absorb the preperiod tail. */
Ray canonical_ray(Ray r);

Ray ray_from_json(const Transducer& t, const json& j);
json ray_to_json(const Transducer& t, const Ray& r);

/** @brief Render as "a b | c d ^inf" (preperiod, separator, period). */
std::string render_ray(const Transducer& t, const Ray& r);

/** @brief Apply an element to one letter: returns (output letter, restricted element). */
std::pair<int, Element> act_letter(const Transducer& t, const Element& e, int letter);

/** @brief Apply an element to a finite word: returns (output word, restriction). */
std::pair<std::vector<int>, Element> act_word(const Transducer& t, const Element& e,
                                              const std::vector<int>& word);

/** @brief Apply an element to a ray; the image is again eventually periodic. */
Ray act_ray(const Transducer& t, const Element& e, const Ray& r);

/**
 * @brief Semantic equality of two elements by breadth-first bisimulation.
 *
 * Explores pairs of restrictions; throws Error("CapExceeded", ...) when more
 * than @p cap pairs are visited.
 */
bool elements_equal(const Transducer& t, const Element& a, const Element& b,
                    std::size_t cap = 1000000);

/**
 * @brief Canonical key of the minimal machine generated by an element.
 *
 * Two elements have equal keys exactly when they act identically, so the key
 * serves as a hash-consing handle for semantic classes.
 */
std::string canonical_key(const Transducer& t, const Element& e);

/**
 * @brief Add formal inverse states for every invertible non-identity state,
 *        pruning inverses that already act like an existing state.
 */
Transducer inverse_closure(const Transducer& t);

/** @brief Serialize an element for use as a map key. */
std::string element_token(const Element& e);

}  // namespace selfsim

#endif  // SELFSIM_TRANSDUCER_HPP
