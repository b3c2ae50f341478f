#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace tracecls {

enum class Label : int { Goodware = 0, Ransomware = 1 };

// Registry, file and extension sections share the same four operations.
enum class AccessOp : int { Read = 0, Open = 1, Write = 2, Delete = 3 };
enum class DirOp : int { Enumerate = 0, Create = 1 };

inline constexpr std::array<AccessOp, 4> kAccessOps = {
    AccessOp::Read, AccessOp::Open, AccessOp::Write, AccessOp::Delete};
inline constexpr std::array<DirOp, 2> kDirOps = {DirOp::Enumerate, DirOp::Create};

std::string_view to_string(AccessOp op);
std::string_view to_string(DirOp op);
std::string_view to_string(Label label);

using TokenSet = std::set<std::string>;

// Canonical parsed form of one sample's sandbox trace: the seven feature
// sections plus label and family. Tokens are stored normalized (lower case,
// one path separator, extensions without the leading dot) and deduplicated.
struct BehavioralReport {
  std::string sample_id;
  std::optional<Label> label;
  std::optional<std::string> family;

  TokenSet api_calls;
  std::map<AccessOp, TokenSet> registry_ops;
  std::map<AccessOp, TokenSet> file_ops;
  std::map<AccessOp, TokenSet> extension_ops;
  std::map<DirOp, TokenSet> directory_ops;
  TokenSet dropped_file_types;
  TokenSet strings;

  // A report is effective iff it produced at least one api call; callers
  // decide whether non-effective reports are kept.
  bool effective() const { return !api_calls.empty(); }

  bool operator==(const BehavioralReport&) const = default;
};

// Normalization rules applied by the parser. Idempotent by construction.
std::string normalize_token(std::string_view raw);       // trim + lower-case
std::string normalize_path(std::string_view raw);        // + unify separators to '\'
std::string normalize_extension(std::string_view raw);   // + strip leading dots

}  // namespace tracecls
