#include "tracecls/report.hpp"

namespace tracecls {

std::string_view to_string(AccessOp op) {
  switch (op) {
    case AccessOp::Read: return "read";
    case AccessOp::Open: return "open";
    case AccessOp::Write: return "write";
    case AccessOp::Delete: return "delete";
  }
  return "?";
}

std::string_view to_string(DirOp op) {
  switch (op) {
    case DirOp::Enumerate: return "enumerate";
    case DirOp::Create: return "create";
  }
  return "?";
}

std::string_view to_string(Label label) {
  return label == Label::Ransomware ? "ransomware" : "goodware";
}

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

char lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace

std::string normalize_token(std::string_view raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  while (b < e && is_space(raw[b])) ++b;
  while (e > b && is_space(raw[e - 1])) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) out.push_back(lower(raw[i]));
  return out;
}

std::string normalize_path(std::string_view raw) {
  std::string out = normalize_token(raw);
  for (char& c : out) {
    if (c == '/') c = '\\';
  }
  return out;
}

std::string normalize_extension(std::string_view raw) {
  std::string out = normalize_token(raw);
  std::size_t b = 0;
  while (b < out.size() && out[b] == '.') ++b;
  return out.substr(b);
}

}  // namespace tracecls
