#include "vesselpose/ais.h"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "vesselpose/error.h"

namespace vesselpose {
namespace {

constexpr std::string_view kSixBitText =
    "@ABCDEFGHIJKLMNOPQRSTUVWXYZ[\\]^_ !\"#$%&'()*+,-./0123456789:;<=>?";

int ArmorValue(char c) {
  const int code = static_cast<unsigned char>(c);
  if (code < 48 || code > 119 || (code > 87 && code < 96)) {
    throw Error(ErrorCode::kMalformed, std::string("bad payload character '") + c + "'");
  }
  return code < 96 ? code - 48 : code - 56;
}

char ArmorChar(int v) { return static_cast<char>(v < 40 ? v + 48 : v + 56); }

std::vector<std::string_view> SplitFields(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int ParseInt(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kMalformed, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

int HexDigit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

void RequireBits(const AisBits& bits, std::size_t n, std::string_view what) {
  if (bits.size() < n) {
    throw Error(ErrorCode::kMalformed, std::string(what) + " payload has " +
                                           std::to_string(bits.size()) + " bits, needs " +
                                           std::to_string(n));
  }
}

}  // namespace

std::uint8_t NmeaChecksum(std::string_view body) {
  std::uint8_t sum = 0;
  for (char c : body) sum ^= static_cast<std::uint8_t>(c);
  return sum;
}

RawFragment ParseSentence(std::string_view line, double timestamp) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n' || line.back() == ' ')) {
    line.remove_suffix(1);
  }
  if (line.empty()) throw Error(ErrorCode::kMalformed, "empty line");
  if (!line.starts_with("!AIVDM") && !line.starts_with("!AIVDO")) {
    throw Error(ErrorCode::kMalformed, "not an AIVDM/AIVDO sentence");
  }
  const std::size_t star = line.rfind('*');
  if (star == std::string_view::npos || star + 3 != line.size()) {
    throw Error(ErrorCode::kMalformed, "missing checksum field");
  }
  const int hi = HexDigit(line[star + 1]);
  const int lo = HexDigit(line[star + 2]);
  if (hi < 0 || lo < 0) throw Error(ErrorCode::kMalformed, "non-hex checksum");
  const std::string_view body = line.substr(1, star - 1);
  if (NmeaChecksum(body) != hi * 16 + lo) {
    throw Error(ErrorCode::kBadChecksum, std::string(line));
  }

  const auto fields = SplitFields(body, ',');
  if (fields.size() != 7) {
    throw Error(ErrorCode::kMalformed, "expected 7 fields, got " + std::to_string(fields.size()));
  }
  RawFragment f;
  f.timestamp = timestamp;
  f.fragment_count = ParseInt(fields[1], "fragment count");
  f.fragment_index = ParseInt(fields[2], "fragment index");
  if (f.fragment_count < 1 || f.fragment_count > 9 || f.fragment_index < 1 ||
      f.fragment_index > f.fragment_count) {
    throw Error(ErrorCode::kMalformed, "fragment numbering out of range");
  }
  if (!fields[3].empty()) f.message_id = ParseInt(fields[3], "message id");
  if (f.fragment_count > 1 && !f.message_id) {
    throw Error(ErrorCode::kMalformed, "multipart fragment without message id");
  }
  f.channel = fields[4].empty() ? 'A' : fields[4].front();
  f.payload = std::string(fields[5]);
  if (f.payload.empty()) throw Error(ErrorCode::kMalformed, "empty payload");
  for (char c : f.payload) ArmorValue(c);
  f.fill_bits = ParseInt(fields[6], "fill bits");
  if (f.fill_bits < 0 || f.fill_bits > 5) {
    throw Error(ErrorCode::kMalformed, "fill bits out of range");
  }
  return f;
}

void AisBits::AppendArmored(std::string_view payload, int fill_bits) {
  for (char c : payload) {
    const int v = ArmorValue(c);
    for (int b = 5; b >= 0; --b) bits_.push_back((v >> b) & 1);
  }
  if (fill_bits > 0) {
    bits_.resize(bits_.size() - std::min<std::size_t>(fill_bits, bits_.size()));
  }
}

void AisBits::AppendUnsigned(std::uint64_t value, int width) {
  for (int b = width - 1; b >= 0; --b) bits_.push_back((value >> b) & 1U);
}

void AisBits::AppendText(std::string_view text, int chars) {
  for (int i = 0; i < chars; ++i) {
    char c = i < static_cast<int>(text.size()) ? text[i] : '@';
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    const auto pos = kSixBitText.find(c);
    AppendUnsigned(pos == std::string_view::npos ? 0 : pos, 6);
  }
}

std::uint64_t AisBits::Unsigned(std::size_t start, int width) const {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 1) | (bits_.at(start + i) ? 1U : 0U);
  return v;
}

std::int64_t AisBits::Signed(std::size_t start, int width) const {
  const std::uint64_t u = Unsigned(start, width);
  if (u & (std::uint64_t{1} << (width - 1))) {
    return static_cast<std::int64_t>(u) - (std::int64_t{1} << width);
  }
  return static_cast<std::int64_t>(u);
}

std::string AisBits::Text(std::size_t start, int chars) const {
  std::string s;
  for (int i = 0; i < chars; ++i) s.push_back(kSixBitText[Unsigned(start + 6 * i, 6)]);
  while (!s.empty() && s.back() == '@') s.pop_back();
  const auto first = s.find_first_not_of(' ');
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(' ') - first + 1);
}

std::string AisBits::Armor(int* fill_bits) const {
  const int fill = static_cast<int>((6 - bits_.size() % 6) % 6);
  std::string out;
  int v = 0, n = 0;
  for (std::size_t i = 0; i < bits_.size() + fill; ++i) {
    v = (v << 1) | (i < bits_.size() && bits_[i] ? 1 : 0);
    if (++n == 6) {
      out.push_back(ArmorChar(v));
      v = n = 0;
    }
  }
  if (fill_bits) *fill_bits = fill;
  return out;
}

AisBits AssembleMultipart(std::span<const RawFragment> fragments) {
  if (fragments.empty()) throw Error(ErrorCode::kIncompleteMultipart, "no fragments");
  const int count = fragments.front().fragment_count;
  std::vector<const RawFragment*> ordered(count, nullptr);
  for (const RawFragment& f : fragments) {
    if (f.fragment_count != count || f.message_id != fragments.front().message_id ||
        f.channel != fragments.front().channel) {
      throw Error(ErrorCode::kMalformed, "fragments from different messages");
    }
    if (ordered[f.fragment_index - 1]) {
      throw Error(ErrorCode::kMalformed, "duplicate fragment index");
    }
    ordered[f.fragment_index - 1] = &f;
  }
  AisBits bits;
  for (int i = 0; i < count; ++i) {
    if (!ordered[i]) {
      throw Error(ErrorCode::kIncompleteMultipart,
                  "fragment " + std::to_string(i + 1) + " of " + std::to_string(count) + " missing");
    }
    bits.AppendArmored(ordered[i]->payload, i + 1 == count ? ordered[i]->fill_bits : 0);
  }
  return bits;
}

std::optional<MultipartAssembler::Completed> MultipartAssembler::Add(const RawFragment& fragment) {
  Expire(fragment.timestamp);
  if (fragment.fragment_count == 1) {
    return Completed{fragment.timestamp, AssembleMultipart(std::span(&fragment, 1))};
  }
  const auto key = std::make_pair(*fragment.message_id, fragment.channel);
  auto& parts = pending_[key];
  // A fragment that restarts numbering or changes the count belongs to a new
  // message; whatever was pending under this key is abandoned.
  if (!parts.empty() && (parts.front().fragment_count != fragment.fragment_count ||
                         fragment.fragment_index <= parts.back().fragment_index)) {
    ++incomplete_;
    parts.clear();
  }
  if (parts.empty() && fragment.fragment_index != 1) {
    ++incomplete_;
    pending_.erase(key);
    return std::nullopt;
  }
  parts.push_back(fragment);
  if (static_cast<int>(parts.size()) < fragment.fragment_count) return std::nullopt;
  std::vector<RawFragment> done = std::move(parts);
  pending_.erase(key);
  return Completed{fragment.timestamp, AssembleMultipart(done)};
}

int MultipartAssembler::Expire(double now) {
  int dropped = 0;
  for (auto it = pending_.begin(); it != pending_.end();) {
    if (!it->second.empty() && now - it->second.front().timestamp > timeout_s_) {
      ++dropped;
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }
  incomplete_ += dropped;
  return dropped;
}

int MessageType(const AisBits& bits) {
  RequireBits(bits, 6, "message");
  return static_cast<int>(bits.Unsigned(0, 6));
}

PositionReport DecodePositionReport(const AisBits& bits, double timestamp) {
  const int type = MessageType(bits);
  if (type < 1 || type > 3) {
    throw Error(ErrorCode::kWrongType, "expected type 1-3, got " + std::to_string(type));
  }
  RequireBits(bits, 137, "position report");
  PositionReport r;
  r.message_type = type;
  r.timestamp = timestamp;
  r.mmsi = static_cast<std::uint32_t>(bits.Unsigned(8, 30));
  const std::uint64_t sog = bits.Unsigned(50, 10);
  if (sog != 1023) r.speed_over_ground_mps = sog / 10.0 * kKnotsToMetersPerSecond;
  const std::int64_t lon = bits.Signed(61, 28);
  const std::int64_t lat = bits.Signed(89, 27);
  if (lon != 181 * 600000) r.longitude_deg = lon / 600000.0;
  if (lat != 91 * 600000) r.latitude_deg = lat / 600000.0;
  const std::uint64_t cog = bits.Unsigned(116, 12);
  if (cog < 3600) r.course_over_ground_deg = cog / 10.0;
  const std::uint64_t heading = bits.Unsigned(128, 9);
  if (heading < 360) r.heading_deg = static_cast<double>(heading);
  return r;
}

StaticVoyage DecodeStaticVoyage(const AisBits& bits, double timestamp) {
  const int type = MessageType(bits);
  if (type != 5) {
    throw Error(ErrorCode::kWrongType, "expected type 5, got " + std::to_string(type));
  }
  RequireBits(bits, 270, "static and voyage");
  StaticVoyage s;
  s.timestamp = timestamp;
  s.mmsi = static_cast<std::uint32_t>(bits.Unsigned(8, 30));
  s.callsign = bits.Text(70, 7);
  s.name = bits.Text(112, 20);
  s.ship_type = static_cast<int>(bits.Unsigned(232, 8));
  s.dim_to_bow = static_cast<int>(bits.Unsigned(240, 9));
  s.dim_to_stern = static_cast<int>(bits.Unsigned(249, 9));
  s.dim_to_port = static_cast<int>(bits.Unsigned(258, 6));
  s.dim_to_starboard = static_cast<int>(bits.Unsigned(264, 6));
  return s;
}

std::uint32_t MessageMmsi(const AisMessage& message) {
  return std::visit([](const auto& m) { return m.mmsi; }, message);
}

double MessageTimestamp(const AisMessage& message) {
  return std::visit([](const auto& m) { return m.timestamp; }, message);
}

std::vector<AisMessage> ReadAisLog(std::istream& in, AisLogStats* stats) {
  AisLogStats local;
  AisLogStats& st = stats ? *stats : local;
  MultipartAssembler assembler;
  std::vector<AisMessage> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++st.lines;
    const std::size_t space = line.find(' ');
    double timestamp = 0.0;
    try {
      if (space == std::string::npos) throw Error(ErrorCode::kMalformed, "missing timestamp");
      std::size_t used = 0;
      timestamp = std::stod(line.substr(0, space), &used);
      if (used != space) throw Error(ErrorCode::kMalformed, "bad timestamp");
    } catch (const std::exception&) {
      ++st.malformed;
      continue;
    }
    try {
      const RawFragment fragment = ParseSentence(std::string_view(line).substr(space + 1), timestamp);
      const auto completed = assembler.Add(fragment);
      if (!completed) continue;
      const int type = MessageType(completed->bits);
      if (type >= 1 && type <= 3) {
        out.emplace_back(DecodePositionReport(completed->bits, completed->timestamp));
      } else if (type == 5) {
        out.emplace_back(DecodeStaticVoyage(completed->bits, completed->timestamp));
      } else {
        ++st.skipped_types;
        continue;
      }
      ++st.decoded;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kBadChecksum) {
        ++st.bad_checksum;
      } else {
        ++st.malformed;
      }
    }
  }
  assembler.Expire(std::numeric_limits<double>::infinity());
  st.incomplete = assembler.incomplete();
  return out;
}

std::string_view ReadinessName(Readiness r) {
  switch (r) {
    case Readiness::kReady: return "ready";
    case Readiness::kNoPosition: return "no_position";
    case Readiness::kNoPositionFix: return "no_position_fix";
    case Readiness::kNoHeading: return "no_heading";
    case Readiness::kNoStatic: return "no_static";
    case Readiness::kNoDimensions: return "no_dimensions";
    case Readiness::kStale: return "stale";
  }
  return "unknown";
}

Readiness CheckPoseReady(const VesselState& state, double image_time, double max_age_s) {
  if (!state.position) return Readiness::kNoPosition;
  const PositionReport& p = *state.position;
  if (!p.latitude_deg || !p.longitude_deg) return Readiness::kNoPositionFix;
  if (!p.heading_deg) return Readiness::kNoHeading;
  if (!state.static_voyage) return Readiness::kNoStatic;
  if (!state.static_voyage->usable()) return Readiness::kNoDimensions;
  const double age = image_time - p.timestamp;
  if (age < 0.0 || age > max_age_s) return Readiness::kStale;
  return Readiness::kReady;
}

std::map<std::uint32_t, VesselState> Aggregate(std::span<const AisMessage> messages,
                                               double up_to) {
  std::map<std::uint32_t, VesselState> states;
  for (const AisMessage& message : messages) {
    if (MessageTimestamp(message) > up_to) continue;
    VesselState& state = states[MessageMmsi(message)];
    state.mmsi = MessageMmsi(message);
    std::visit(
        [&state](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, PositionReport>) {
            if (!state.position || m.timestamp >= state.position->timestamp) state.position = m;
          } else {
            if (!state.static_voyage || m.timestamp >= state.static_voyage->timestamp) {
              state.static_voyage = m;
            }
          }
        },
        message);
    state.last_update = std::max(state.position ? state.position->timestamp : -INFINITY,
                                 state.static_voyage ? state.static_voyage->timestamp : -INFINITY);
  }
  return states;
}

Eigen::Vector3d DeadReckon(const VesselFrame& frame, double speed_mps, double age_s) {
  if (speed_mps < 0.0 || age_s < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "dead reckoning needs speed >= 0 and age >= 0");
  }
  return speed_mps * age_s * frame.x_axis;
}

}  // namespace vesselpose
