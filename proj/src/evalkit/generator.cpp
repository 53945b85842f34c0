#include "amppere/evalkit/generator.hpp"

#include "amppere/machine/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <string_view>

namespace amppere {
namespace {

constexpr std::array kGivenNames{
    "peter",  "mary",    "james",   "linda",   "robert", "susan",   "michael", "karen",  "william",
    "sarah",  "david",   "jessica", "richard", "emily",  "joseph",  "olivia",  "thomas", "chloe",
    "charles", "grace",  "daniel",  "hannah",  "matthew", "lucy",   "anthony", "isabella", "mark",
    "sophie", "steven",  "amelia",  "andrew",  "zoe",     "joshua", "ruby",    "kevin",  "ella",
    "brian",  "mia",     "george",  "charlotte", "edward", "harriet", "ronald", "matilda", "timothy",
    "abigail", "jason",  "scarlett", "jeffrey", "phoebe", "ryan",   "imogen",  "jacob",  "georgia",
    "gary",   "madison", "nicholas", "eleanor", "eric",   "violet"};

constexpr std::array kSurnames{
    "smith",    "jones",    "williams", "brown",   "wilson",   "taylor",   "johnson", "white",
    "martin",   "anderson", "thompson", "nguyen",  "thomas",   "walker",   "harris",  "lee",
    "ryan",     "robinson", "kelly",    "king",    "davis",    "wright",   "evans",   "roberts",
    "green",    "hall",     "wood",     "jackson", "clarke",   "patel",    "khan",    "lewis",
    "james",    "phillips", "mitchell", "campbell", "young",   "allen",    "scott",   "baker",
    "adams",    "hughes",   "edwards",  "turner",  "collins",  "stewart",  "morris",  "murphy",
    "cook",     "rogers",   "morgan",   "cooper",  "peterson", "bailey",   "reed",    "kennedy",
    "fitzgerald", "oconnor", "macdonald", "henderson"};

constexpr std::array kStreets{
    "george",    "victoria",  "elizabeth", "church",   "high",     "park",      "station",
    "king",      "queen",     "william",   "railway",  "bridge",   "albert",    "wattle",
    "banksia",   "acacia",    "waratah",   "jacaranda", "kookaburra", "lyons",  "macquarie",
    "pitt",      "collins",   "bourke",    "flinders", "swanston", "hunter",    "oxford",
    "crown",     "mountain",  "river",     "ocean",    "beach",    "forest",    "hill",
    "valley",    "orchard",   "miller",    "kent",     "darling"};

constexpr std::array kStreetTypes{"street", "road", "avenue", "place", "crescent", "drive", "lane", "parade"};

constexpr std::array kSuburbs{
    "parramatta", "chatswood",   "hornsby",    "penrith",    "bondi",      "manly",      "newtown",
    "fitzroy",    "richmond",    "carlton",    "brunswick",  "geelong",    "ballarat",   "bendigo",
    "toowong",    "fortitude valley", "southport", "cairns",   "townsville", "fremantle",  "subiaco",
    "joondalup",  "glenelg",     "norwood",    "hobart",     "launceston", "belconnen",  "woden",
    "palmerston", "katherine",   "wollongong", "gosford",    "dubbo",      "orange",     "tamworth",
    "mildura",    "shepparton",  "bunbury",    "mackay",     "toowoomba"};

struct State {
  const char* code;
  int postcodeLow;
  int postcodeHigh;
};

constexpr std::array kStates{State{"nsw", 2000, 2999}, State{"vic", 3000, 3999}, State{"qld", 4000, 4999},
                             State{"sa", 5000, 5799},  State{"wa", 6000, 6797},  State{"tas", 7000, 7799},
                             State{"act", 2600, 2618}, State{"nt", 800, 899}};

constexpr std::array<std::string_view, 36> kKeyboardRows{
    // neighbours of each key on a qwerty layout, indexed by position in kKeys
    "qwsz", "vghn", "xdfv", "serfcx", "wsdr", "drtgvc", "ftyhbv", "gyujnb", "ujko", "huikmn",
    "jiolm", "kop", "njk", "bhjm", "iklp", "ol", "wa", "edft", "awedxz", "rfgy",
    "yhji", "cfgb", "qase", "zsdc", "tghu", "asx", "2q", "13qw", "24we", "35er",
    "46rt", "57ty", "68yu", "79ui", "80io", "9op"};
constexpr std::string_view kKeys = "abcdefghijklmnopqrstuvwxyz0123456789";

constexpr std::array<std::pair<std::string_view, std::string_view>, 12> kOcrPairs{{
    {"o", "0"}, {"s", "5"}, {"l", "1"}, {"i", "1"}, {"b", "8"}, {"g", "9"},
    {"z", "2"}, {"rn", "m"}, {"cl", "d"}, {"vv", "w"}, {"e", "c"}, {"q", "9"}}};

constexpr std::array<std::pair<std::string_view, std::string_view>, 24> kPhoneticRules{{
    {"ph", "f"}, {"f", "ph"}, {"ck", "k"}, {"gh", "g"}, {"th", "t"}, {"ee", "ea"},
    {"ou", "ow"}, {"ie", "y"}, {"sch", "sh"}, {"mb", "m"}, {"qu", "kw"}, {"x", "ks"},
    {"oo", "u"}, {"ay", "ai"}, {"ca", "ka"}, {"ei", "ie"}, {"tion", "shun"}, {"wr", "r"},
    {"kn", "n"}, {"dd", "d"}, {"ll", "l"}, {"tt", "t"}, {"ss", "s"}, {"nn", "n"}}};

std::string_view neighbours(char c) {
  const auto pos = kKeys.find(c);
  return pos == std::string_view::npos ? std::string_view{} : kKeyboardRows[pos];
}

// Applies one rewrite chosen uniformly among every (rule, position) site.
template <typename Rules>
bool rewrite(Corruptor& rng, std::string& value, const Rules& rules, bool bothWays) {
  struct Site {
    std::size_t pos;
    std::string_view from;
    std::string_view to;
  };
  std::vector<Site> sites;
  auto collect = [&](std::string_view from, std::string_view to) {
    for (auto pos = value.find(from); pos != std::string::npos; pos = value.find(from, pos + 1)) {
      sites.push_back({pos, from, to});
    }
  };
  for (const auto& [a, b] : rules) {
    collect(a, b);
    if (bothWays) collect(b, a);
  }
  if (sites.empty()) return false;
  const auto& s = sites[rng.below(sites.size())];
  value.replace(s.pos, s.from.size(), s.to);
  return true;
}

template <typename Array>
std::string pick(Corruptor& rng, const Array& values) {
  return values[rng.below(values.size())];
}

Record makeOriginal(Corruptor& rng, std::string id) {
  const auto& state = kStates[rng.below(kStates.size())];
  const int postcode = state.postcodeLow + static_cast<int>(rng.below(static_cast<std::size_t>(
                                               state.postcodeHigh - state.postcodeLow + 1)));
  char postcodeText[8];
  std::snprintf(postcodeText, sizeof postcodeText, "%04d", postcode);
  return Record{std::move(id),
                {{"given_name", pick(rng, kGivenNames)},
                 {"surname", pick(rng, kSurnames)},
                 {"street_number", std::to_string(1 + rng.below(300))},
                 {"address", pick(rng, kStreets) + " " + pick(rng, kStreetTypes)},
                 {"suburb", pick(rng, kSuburbs)},
                 {"postcode", postcodeText},
                 {"state", state.code}}};
}

int zipfDraw(Corruptor& rng, int max, double exponent) {
  double total = 0.0;
  for (int k = 1; k <= max; ++k) total += std::pow(k, -exponent);
  double u = rng.unit() * total;
  for (int k = 1; k <= max; ++k) {
    u -= std::pow(k, -exponent);
    if (u < 0.0) return k;
  }
  return max;
}

int corruptRecord(Corruptor& rng, Record& record, const CorruptionProfile& profile) {
  if (profile.maxModificationsPerRecord <= 0 || profile.maxModificationsPerField <= 0 || profile.kinds.empty()) {
    return 0;
  }
  const int target = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(profile.maxModificationsPerRecord)));
  std::vector<int> perField(record.fields.size(), 0);
  int applied = 0;
  for (int attempt = 0; applied < target && attempt < 8 * target; ++attempt) {
    const auto f = rng.below(record.fields.size());
    if (perField[f] >= profile.maxModificationsPerField) continue;
    const Corruption kind = profile.kinds[rng.below(profile.kinds.size())];
    if (rng.apply(kind, record.fields[f].second)) {
      ++perField[f];
      ++applied;
    }
  }
  return applied;
}

}  // namespace

std::string corruptionName(Corruption c) {
  switch (c) {
    case Corruption::kTypo: return "typo";
    case Corruption::kOcr: return "ocr";
    case Corruption::kPhonetic: return "phonetic";
  }
  return "?";
}

std::uint64_t Corruptor::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool Corruptor::apply(Corruption kind, std::string& value) {
  switch (kind) {
    case Corruption::kTypo: return typo(value);
    case Corruption::kOcr: return ocr(value);
    case Corruption::kPhonetic: return phonetic(value);
  }
  return false;
}

bool Corruptor::typo(std::string& value) {
  if (value.empty()) return false;
  const auto pos = below(value.size());
  const auto near = neighbours(value[pos]);
  switch (below(4)) {
    case 0:
      if (near.empty()) return false;
      value[pos] = near[below(near.size())];
      return true;
    case 1:
      if (near.empty()) return false;
      value.insert(value.begin() + static_cast<std::ptrdiff_t>(pos) + 1, near[below(near.size())]);
      return true;
    case 2:
      if (value.size() < 2) return false;
      value.erase(pos, 1);
      return true;
    default:
      if (pos + 1 >= value.size() || value[pos] == value[pos + 1]) return false;
      std::swap(value[pos], value[pos + 1]);
      return true;
  }
}

bool Corruptor::ocr(std::string& value) { return rewrite(*this, value, kOcrPairs, true); }

bool Corruptor::phonetic(std::string& value) { return rewrite(*this, value, kPhoneticRules, false); }

Dataset generateDataset(const GeneratorConfig& config) {
  if (config.size < 2) throw Error("dataset needs at least two records");
  if (!(config.firstShare > 0.0 && config.firstShare < 1.0)) throw Error("split share must lie in (0, 1)");
  const auto& profile = config.profile;
  if (profile.maxDuplicatesPerOriginal < 1) throw Error("at least one duplicate per original is required");

  const int firstSize = std::max(1, static_cast<int>(std::lround(config.size * config.firstShare)));
  const int secondSize = config.size - firstSize;
  if (secondSize < 1) throw Error("split leaves the second dataset empty");

  Corruptor rng(config.seed);
  Dataset data;
  std::set<std::string> seenText;
  while (static_cast<int>(data.second.size()) < secondSize) {
    Record r = makeOriginal(rng, "rec-" + std::to_string(data.second.size()) + "-org");
    if (seenText.insert(recordText(r)).second) data.second.push_back(std::move(r));
  }

  std::vector<std::size_t> order(data.second.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  if (static_cast<long>(firstSize) > static_cast<long>(secondSize) * profile.maxDuplicatesPerOriginal) {
    throw Error("too few originals for the requested number of duplicates");
  }
  std::vector<int> made(order.size(), 0);
  int remaining = firstSize;
  for (std::size_t k = 0; remaining > 0; k = (k + 1) % order.size()) {
    const std::size_t origin = order[k];
    const int room = profile.maxDuplicatesPerOriginal - made[origin];
    const int copies = std::min({remaining, room, zipfDraw(rng, profile.maxDuplicatesPerOriginal, profile.zipfExponent)});
    for (int c = 0; c < copies; ++c) {
      Record dup = data.second[origin];
      dup.id = "rec-" + std::to_string(origin) + "-dup-" + std::to_string(made[origin]++);
      data.modifications[dup.id] = corruptRecord(rng, dup, profile);
      data.gold.pairs.emplace(dup.id, data.second[origin].id);
      data.first.push_back(std::move(dup));
    }
    remaining -= std::max(copies, 0);
  }
  return data;
}

}  // namespace amppere
