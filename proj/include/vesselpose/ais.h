#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "vesselpose/geodesy.h"

namespace vesselpose {

inline constexpr double kKnotsToMetersPerSecond = 1852.0 / 3600.0;

// One validated AIVDM/AIVDO line.
struct RawFragment {
  double timestamp = 0.0;  // receiver clock, seconds
  int fragment_count = 1;
  int fragment_index = 1;
  std::optional<int> message_id;  // sequential id, only on multipart
  char channel = 'A';
  std::string payload;  // 6-bit armored
  int fill_bits = 0;
};

// XOR of all characters between the leading '!' and '*'.
std::uint8_t NmeaChecksum(std::string_view body);

// Throws kMalformed or kBadChecksum.
RawFragment ParseSentence(std::string_view line, double timestamp);

// Decoded bit string of one AIS message.
class AisBits {
 public:
  AisBits() = default;
  void AppendArmored(std::string_view payload, int fill_bits);
  void AppendUnsigned(std::uint64_t value, int width);
  void AppendText(std::string_view text, int chars);

  std::size_t size() const { return bits_.size(); }
  std::uint64_t Unsigned(std::size_t start, int width) const;
  std::int64_t Signed(std::size_t start, int width) const;
  // Six-bit text with '@' padding and trailing spaces removed.
  std::string Text(std::size_t start, int chars) const;

  // 6-bit armor, padded with zero fill bits to a whole character.
  std::string Armor(int* fill_bits) const;

  bool operator==(const AisBits&) const = default;

 private:
  std::vector<bool> bits_;
};

// Concatenates a complete set of fragments sharing message id and channel.
// Throws kIncompleteMultipart if any fragment is missing and kMalformed if
// the fragments are inconsistent.
AisBits AssembleMultipart(std::span<const RawFragment> fragments);

// Incremental reassembly keyed by (message id, channel). Partial messages
// older than the timeout are discarded and counted as incomplete.
class MultipartAssembler {
 public:
  explicit MultipartAssembler(double timeout_s = 30.0) : timeout_s_(timeout_s) {}

  struct Completed {
    double timestamp;  // timestamp of the final fragment
    AisBits bits;
  };

  std::optional<Completed> Add(const RawFragment& fragment);
  // Drops partial messages older than the timeout at `now`.
  int Expire(double now);
  int incomplete() const { return incomplete_; }

 private:
  double timeout_s_;
  int incomplete_ = 0;
  std::map<std::pair<int, char>, std::vector<RawFragment>> pending_;
};

int MessageType(const AisBits& bits);

struct PositionReport {
  std::uint32_t mmsi = 0;
  int message_type = 1;
  double timestamp = 0.0;
  std::optional<double> latitude_deg;
  std::optional<double> longitude_deg;
  std::optional<double> speed_over_ground_mps;
  std::optional<double> course_over_ground_deg;
  std::optional<double> heading_deg;

  bool operator==(const PositionReport&) const = default;
};

struct StaticVoyage {
  std::uint32_t mmsi = 0;
  double timestamp = 0.0;
  std::string name;
  std::string callsign;
  int ship_type = 0;
  int dim_to_bow = 0;        // A
  int dim_to_stern = 0;      // B
  int dim_to_port = 0;       // C
  int dim_to_starboard = 0;  // D

  bool usable() const { return dim_to_bow + dim_to_stern > 0; }
  bool operator==(const StaticVoyage&) const = default;
};

// Types 1, 2, 3. Throws kWrongType or kMalformed (short payload).
PositionReport DecodePositionReport(const AisBits& bits, double timestamp);
// Type 5. Throws kWrongType or kMalformed.
StaticVoyage DecodeStaticVoyage(const AisBits& bits, double timestamp);

using AisMessage = std::variant<PositionReport, StaticVoyage>;

std::uint32_t MessageMmsi(const AisMessage& message);
double MessageTimestamp(const AisMessage& message);

struct AisLogStats {
  int lines = 0;
  int decoded = 0;
  int bad_checksum = 0;
  int malformed = 0;
  int incomplete = 0;
  int skipped_types = 0;
};

// Reads "<epoch seconds> <sentence>" lines. Bad lines are counted and
// dropped; only message types 1, 2, 3 and 5 are decoded.
std::vector<AisMessage> ReadAisLog(std::istream& in, AisLogStats* stats = nullptr);

struct VesselState {
  std::uint32_t mmsi = 0;
  std::optional<PositionReport> position;
  std::optional<StaticVoyage> static_voyage;
  double last_update = 0.0;
};

enum class Readiness {
  kReady,
  kNoPosition,
  kNoPositionFix,
  kNoHeading,
  kNoStatic,
  kNoDimensions,
  kStale,
};

std::string_view ReadinessName(Readiness r);

// A vessel is pose-ready with a position fix, an available heading, a static
// record with A + B > 0, and a position no older than max_age_s.
Readiness CheckPoseReady(const VesselState& state, double image_time,
                         double max_age_s);

// Latest-wins aggregation by MMSI over messages with timestamp <= up_to.
std::map<std::uint32_t, VesselState> Aggregate(
    std::span<const AisMessage> messages,
    double up_to = std::numeric_limits<double>::infinity());

// Forward displacement speed * age * x_v.
Eigen::Vector3d DeadReckon(const VesselFrame& frame, double speed_mps,
                           double age_s);

}  // namespace vesselpose
