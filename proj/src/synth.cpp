#include "tracecls/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "tracecls/errors.hpp"
#include "tracecls/ingest.hpp"
#include "tracecls/rng.hpp"

namespace tracecls {

namespace {

std::string pad(int n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, n);
  return buf;
}

const std::vector<std::string>& curated_api() {
  static const std::vector<std::string> v = {
      "cryptencrypt", "cryptdecrypt", "cryptgenkey", "cryptderivekey",
      "cryptacquirecontextw", "cryptreleasecontext", "cryptimportkey", "cryptexportkey",
      "crypthashdata", "cryptcreatehash", "cryptdestroykey", "bcryptencrypt",
      "bcryptgenrandom", "createfilew", "writefile", "readfile", "deletefilew",
      "movefileexw", "copyfilew", "findfirstfilew", "findnextfilew",
      "getfileattributesw", "setfileattributesw", "setfilepointer", "setendoffile",
      "flushfilebuffers", "lockfile", "unlockfile", "createfilemappingw",
      "mapviewoffile", "unmapviewoffile", "regopenkeyexw", "regsetvalueexw",
      "regqueryvalueexw", "regdeletevaluew", "regclosekey", "regcreatekeyexw",
      "regenumkeyexw", "regenumvaluew", "ntcreatefile", "ntwritefile", "ntreadfile",
      "ntsetinformationfile", "ntquerydirectoryfile", "ntopenkey", "ntsetvaluekey",
      "ntdeletevaluekey", "createprocessw", "openprocess", "terminateprocess",
      "virtualalloc", "virtualallocex", "virtualprotect", "writeprocessmemory",
      "readprocessmemory", "createremotethread", "createthread", "loadlibraryw",
      "getprocaddress", "getmodulehandlew", "internetopenw", "internetopenurlw",
      "internetconnectw", "httpopenrequestw", "httpsendrequestw", "urldownloadtofilew",
      "wsastartup", "connect", "send", "recv", "gethostbyname", "getaddrinfo",
      "shellexecutew", "winexec", "setwindowshookexw", "getasynckeystate",
      "getforegroundwindow", "findwindoww", "sendmessagew", "postmessagew",
      "createmutexw", "openmutexw", "createeventw", "setwaitabletimer", "sleepex",
      "getsystemtime", "gettickcount", "queryperformancecounter", "isdebuggerpresent",
      "checkremotedebuggerpresent", "adjusttokenprivileges", "openprocesstoken",
      "lookupprivilegevaluew", "createservicew", "openservicew", "startservicew",
      "controlservice", "deleteservice", "openscmanagerw", "getvolumeinformationw",
      "getdrivetypew", "getlogicaldrives", "getcomputernamew", "getusernamew",
      "gettemppathw", "getwindowsdirectoryw", "getsystemdirectoryw",
  };
  return v;
}

const std::vector<std::string>& curated_reg() {
  static const std::vector<std::string> v = {
      "hklm\\software\\microsoft\\windows\\currentversion\\run",
      "hklm\\software\\microsoft\\windows\\currentversion\\runonce",
      "hkcu\\software\\microsoft\\windows\\currentversion\\run",
      "hkcu\\software\\microsoft\\windows\\currentversion\\runonce",
      "hklm\\software\\microsoft\\windows nt\\currentversion\\winlogon\\shell",
      "hklm\\software\\microsoft\\windows nt\\currentversion\\winlogon\\userinit",
      "hkcu\\control panel\\desktop\\wallpaper",
      "hkcu\\control panel\\desktop\\scrnsave.exe",
      "hklm\\system\\currentcontrolset\\services\\vss",
      "hklm\\system\\currentcontrolset\\services\\bits",
      "hklm\\system\\currentcontrolset\\control\\session manager",
      "hklm\\software\\microsoft\\windows\\currentversion\\policies\\system",
      "hkcu\\software\\microsoft\\windows\\currentversion\\policies\\explorer",
      "hklm\\software\\microsoft\\windows defender\\real-time protection",
      "hklm\\software\\policies\\microsoft\\windows defender",
      "hkcu\\software\\microsoft\\windows\\currentversion\\explorer\\shell folders",
      "hklm\\software\\microsoft\\windows\\currentversion\\explorer\\shell folders",
      "hkcu\\software\\microsoft\\windows\\currentversion\\internet settings",
      "hklm\\software\\microsoft\\cryptography\\defaults\\provider",
      "hklm\\software\\microsoft\\cryptography\\machineguid",
      "hkcu\\software\\microsoft\\office\\common\\userinfo",
      "hklm\\software\\classes\\exefile\\shell\\open\\command",
      "hkcu\\software\\classes\\mscfile\\shell\\open\\command",
      "hklm\\system\\currentcontrolset\\control\\terminal server",
      "hklm\\software\\microsoft\\windows nt\\currentversion\\accessibility",
      "hkcu\\software\\microsoft\\terminal server client\\default",
      "hklm\\system\\currentcontrolset\\services\\lanmanserver\\parameters",
      "hklm\\software\\microsoft\\windows\\currentversion\\uninstall",
      "hkcu\\software\\microsoft\\windows\\currentversion\\uninstall",
      "hklm\\software\\microsoft\\windows nt\\currentversion\\schedule",
  };
  return v;
}

const std::vector<std::string>& curated_file() {
  static const std::vector<std::string> v = {
      "c:\\users\\admin\\documents\\report.doc",
      "c:\\users\\admin\\documents\\budget.xls",
      "c:\\users\\admin\\documents\\thesis.docx",
      "c:\\users\\admin\\documents\\contacts.csv",
      "c:\\users\\admin\\pictures\\holiday.jpg",
      "c:\\users\\admin\\pictures\\family.png",
      "c:\\users\\admin\\desktop\\notes.txt",
      "c:\\users\\admin\\desktop\\how_to_decrypt.txt",
      "c:\\users\\admin\\desktop\\readme_for_decrypt.html",
      "c:\\users\\admin\\music\\track01.mp3",
      "c:\\users\\admin\\videos\\clip.mp4",
      "c:\\users\\admin\\downloads\\setup.exe",
      "c:\\users\\admin\\appdata\\local\\temp\\install.log",
      "c:\\users\\admin\\appdata\\roaming\\config.ini",
      "c:\\users\\public\\documents\\shared.doc",
      "c:\\programdata\\readme.txt",
      "c:\\programdata\\license.key",
      "c:\\windows\\system32\\kernel32.dll",
      "c:\\windows\\system32\\ntdll.dll",
      "c:\\windows\\system32\\drivers\\etc\\hosts",
      "c:\\windows\\temp\\update.tmp",
      "c:\\windows\\win.ini",
      "c:\\boot.ini",
      "c:\\pagefile.sys",
      "c:\\program files\\common files\\service.exe",
      "c:\\users\\admin\\documents\\wallet.dat",
      "c:\\users\\admin\\documents\\passwords.kdbx",
      "c:\\users\\admin\\documents\\backup.zip",
      "c:\\users\\admin\\pictures\\scan0001.bmp",
      "c:\\users\\admin\\documents\\invoice.pdf",
  };
  return v;
}

const std::vector<std::string>& curated_ext() {
  static const std::vector<std::string> v = {
      "doc", "docx", "xls", "xlsx", "ppt", "pptx", "pdf", "jpg", "jpeg", "png",
      "gif", "bmp", "txt", "rtf", "zip", "rar", "7z", "csv", "sql", "mdb",
      "db", "psd", "dwg", "odt", "ods", "avi", "mov", "mp3", "mp4", "wav",
      "exe", "dll", "sys", "ini", "log", "bak", "tmp", "dat", "key", "pem",
      "crt", "wallet", "kdbx", "pst", "eml",
  };
  return v;
}

const std::vector<std::string>& curated_dir() {
  static const std::vector<std::string> v = {
      "c:\\users\\admin\\documents",
      "c:\\users\\admin\\pictures",
      "c:\\users\\admin\\desktop",
      "c:\\users\\admin\\downloads",
      "c:\\users\\admin\\music",
      "c:\\users\\admin\\videos",
      "c:\\users\\admin\\appdata\\roaming",
      "c:\\users\\admin\\appdata\\local\\temp",
      "c:\\users\\public",
      "c:\\users\\public\\documents",
      "c:\\program files",
      "c:\\program files (x86)",
      "c:\\programdata",
      "c:\\windows\\temp",
      "c:\\windows\\system32",
      "c:\\recycler",
      "c:\\system volume information",
      "d:\\backups",
      "d:\\archive",
      "e:\\",
  };
  return v;
}

const std::vector<std::string>& curated_drop() {
  static const std::vector<std::string> v = {
      "exe", "dll", "tmp", "bat", "cmd", "vbs", "js", "ps1", "scr", "pif",
      "locky", "encrypted", "locked", "crypt", "cerber", "zepto", "onion",
      "html", "hta", "txt", "bmp", "key", "bin", "dat", "lnk",
  };
  return v;
}

const std::vector<std::string>& curated_str() {
  static const std::vector<std::string> v = {
      "your personal files are encrypted",
      "all your files have been locked",
      "your documents photos and databases",
      "how to recover your files",
      "what happened to my files",
      "send 0.5 btc to this address",
      "bitcoin", "decrypt", "decryption key", "private key", "payment",
      "tor browser", "install tor", "onion link", "wallet address",
      "aes-256", "rsa-2048", "time left", "deadline", "ransom",
      "restore files", "all your files", "encryption key", "pay within 72 hours",
      "do not try to recover files yourself",
      "license agreement", "uninstall", "update available", "copyright",
      "all rights reserved", "loading", "please wait", "error", "warning",
      "settings", "options", "help", "about", "version", "language",
      "registration", "thank you for installing", "setup wizard",
      "choose installation folder", "installation complete",
  };
  return v;
}

std::string filler_token(FeatureClass cls, int n) {
  switch (cls) {
    case FeatureClass::Api: {
      static const char* verbs[] = {"get", "set", "query", "enum", "open", "close",
                                    "create", "delete", "read", "write", "load", "free",
                                    "alloc", "init", "update", "notify", "register",
                                    "lock", "unlock", "release"};
      static const char* nouns[] = {"window", "key", "file", "buffer", "context",
                                    "section", "token", "timer", "event", "mutex",
                                    "pipe", "port", "view", "thread", "process",
                                    "module", "resource", "string", "value", "object"};
      static const char* suffixes[] = {"", "a", "w", "ex", "exw"};
      constexpr int nv = 20, nn = 20, ns = 5;
      if (n < nv * nn * ns) {
        return std::string(verbs[n % nv]) + nouns[(n / nv) % nn] + suffixes[n / (nv * nn)];
      }
      return "api" + pad(n, 4);
    }
    case FeatureClass::RegRead:
    case FeatureClass::RegOpen:
    case FeatureClass::RegWrite:
    case FeatureClass::RegDelete:
      return std::string(n % 2 ? "hkcu" : "hklm") + "\\software\\app" + pad(n, 3) +
             "\\config";
    case FeatureClass::FileRead:
    case FeatureClass::FileOpen:
    case FeatureClass::FileWrite:
    case FeatureClass::FileDelete: {
      static const char* bases[] = {"c:\\users\\admin\\documents\\", "c:\\users\\admin\\pictures\\",
                                    "c:\\programdata\\", "c:\\windows\\temp\\",
                                    "c:\\users\\admin\\appdata\\local\\"};
      static const char* exts[] = {".dat", ".tmp", ".bin", ".log", ".cfg"};
      return std::string(bases[n % 5]) + "item" + pad(n, 4) + exts[(n / 5) % 5];
    }
    case FeatureClass::ExtRead:
    case FeatureClass::ExtOpen:
    case FeatureClass::ExtWrite:
    case FeatureClass::ExtDelete:
      return "x" + pad(n, 3);
    case FeatureClass::DirEnumerate:
    case FeatureClass::DirCreate:
      return "c:\\users\\admin\\appdata\\roaming\\app" + pad(n, 3);
    case FeatureClass::Drop:
      return "pkg" + pad(n, 2);
    case FeatureClass::Str:
      return "status code " + std::to_string(n);
  }
  throw InvalidConfig("unknown feature class");
}

const std::vector<std::string>& curated_for(FeatureClass cls) {
  switch (cls) {
    case FeatureClass::Api: return curated_api();
    case FeatureClass::RegRead:
    case FeatureClass::RegOpen:
    case FeatureClass::RegWrite:
    case FeatureClass::RegDelete: return curated_reg();
    case FeatureClass::FileRead:
    case FeatureClass::FileOpen:
    case FeatureClass::FileWrite:
    case FeatureClass::FileDelete: return curated_file();
    case FeatureClass::ExtRead:
    case FeatureClass::ExtOpen:
    case FeatureClass::ExtWrite:
    case FeatureClass::ExtDelete: return curated_ext();
    case FeatureClass::DirEnumerate:
    case FeatureClass::DirCreate: return curated_dir();
    case FeatureClass::Drop: return curated_drop();
    case FeatureClass::Str: return curated_str();
  }
  throw InvalidConfig("unknown feature class");
}

std::vector<std::string> tokens_for_class(FeatureClass cls, int size) {
  std::vector<std::string> tokens;
  tokens.reserve(static_cast<std::size_t>(size));
  std::set<std::string> seen;
  for (const auto& t : curated_for(cls)) {
    if (static_cast<int>(tokens.size()) >= size) break;
    if (seen.insert(t).second) tokens.push_back(t);
  }
  for (int n = 0; static_cast<int>(tokens.size()) < size; ++n) {
    std::string t = filler_token(cls, n);
    if (seen.insert(t).second) tokens.push_back(std::move(t));
  }
  return tokens;
}

// Classes where planted signal lives, most plausible first; the core and
// per-family pools are dealt round-robin over these.
const std::vector<FeatureClass>& core_cycle() {
  static const std::vector<FeatureClass> v = {
      FeatureClass::Api,       FeatureClass::FileWrite, FeatureClass::RegWrite,
      FeatureClass::Str,       FeatureClass::FileRead,  FeatureClass::Drop,
      FeatureClass::RegRead,   FeatureClass::ExtWrite,  FeatureClass::DirEnumerate,
      FeatureClass::ExtRead,   FeatureClass::FileDelete, FeatureClass::RegOpen,
      FeatureClass::DirCreate,
  };
  return v;
}

const std::vector<FeatureClass>& family_cycle() {
  static const std::vector<FeatureClass> v = {
      FeatureClass::Str, FeatureClass::Drop, FeatureClass::FileWrite,
      FeatureClass::RegWrite, FeatureClass::Api,
  };
  return v;
}

void insert_token(BehavioralReport& report, FeatureClass cls, const std::string& token) {
  switch (cls) {
    case FeatureClass::Api: report.api_calls.insert(token); break;
    case FeatureClass::RegRead: report.registry_ops[AccessOp::Read].insert(token); break;
    case FeatureClass::RegOpen: report.registry_ops[AccessOp::Open].insert(token); break;
    case FeatureClass::RegWrite: report.registry_ops[AccessOp::Write].insert(token); break;
    case FeatureClass::RegDelete: report.registry_ops[AccessOp::Delete].insert(token); break;
    case FeatureClass::FileRead: report.file_ops[AccessOp::Read].insert(token); break;
    case FeatureClass::FileOpen: report.file_ops[AccessOp::Open].insert(token); break;
    case FeatureClass::FileWrite: report.file_ops[AccessOp::Write].insert(token); break;
    case FeatureClass::FileDelete: report.file_ops[AccessOp::Delete].insert(token); break;
    case FeatureClass::ExtRead: report.extension_ops[AccessOp::Read].insert(token); break;
    case FeatureClass::ExtOpen: report.extension_ops[AccessOp::Open].insert(token); break;
    case FeatureClass::ExtWrite: report.extension_ops[AccessOp::Write].insert(token); break;
    case FeatureClass::ExtDelete: report.extension_ops[AccessOp::Delete].insert(token); break;
    case FeatureClass::DirEnumerate: report.directory_ops[DirOp::Enumerate].insert(token); break;
    case FeatureClass::DirCreate: report.directory_ops[DirOp::Create].insert(token); break;
    case FeatureClass::Drop: report.dropped_file_types.insert(token); break;
    case FeatureClass::Str: report.strings.insert(token); break;
  }
}

std::string lowercase_id(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name)
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  return out;
}

void validate(const SynthConfig& config) {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig(std::string(what) + " must lie in [0, 1]");
  };
  prob(config.signal_present_ransomware, "signal_present_ransomware");
  prob(config.signal_present_goodware, "signal_present_goodware");
  prob(config.background_density, "background_density");
  prob(config.signal_correlation, "signal_correlation");
  if (config.signal_correlation > 0.0 && config.mode != SynthMode::SharedCore)
    throw InvalidConfig("signal_correlation requires shared-core mode");
  if (config.n_goodware < 0 || config.n_core_signal < 0 || config.n_family_signal < 0)
    throw InvalidConfig("counts must be non-negative");
  for (int size : config.vocab_sizes)
    if (size < 0) throw InvalidConfig("vocab sizes must be non-negative");
  if (config.vocab_sizes[static_cast<int>(FeatureClass::Api)] < 1)
    throw InvalidConfig("api vocabulary must hold at least one token");
  std::set<std::string> names;
  for (const auto& family : config.families) {
    if (family.name.empty()) throw InvalidConfig("family names must be non-empty");
    if (family.name.find('/') != std::string::npos ||
        family.name.find('\\') != std::string::npos || family.name.front() == '.')
      throw InvalidConfig("family name unusable in file names: " + family.name);
    if (family.n_samples < 0) throw InvalidConfig("family sample counts must be non-negative");
    if (!names.insert(lowercase_id(family.name)).second)
      throw InvalidConfig("duplicate family name: " + family.name);
  }
}

}  // namespace

std::string to_string(SynthMode mode) {
  return mode == SynthMode::SharedCore ? "shared-core" : "disjoint";
}

SynthMode synth_mode_from_string(const std::string& name) {
  if (name == "shared-core") return SynthMode::SharedCore;
  if (name == "disjoint") return SynthMode::Disjoint;
  throw InvalidConfig("unknown synth mode: " + name);
}

SynthConfig default_synth_config() {
  SynthConfig config;
  config.families = {
      {"Citroni", 50},   {"CryptLocker", 107}, {"CryptoWall", 46}, {"Kollah", 25},
      {"Kovter", 64},    {"Locker", 97},       {"Matsnu", 59},     {"Pgpcoder", 4},
      {"Reveton", 90},   {"TeslaCrypt", 6},    {"Trojan-Ransom", 34},
  };
  auto at = [&config](FeatureClass cls) -> int& {
    return config.vocab_sizes[static_cast<int>(cls)];
  };
  at(FeatureClass::Api) = 600;
  at(FeatureClass::RegRead) = 450;
  at(FeatureClass::RegOpen) = 450;
  at(FeatureClass::RegWrite) = 350;
  at(FeatureClass::RegDelete) = 150;
  at(FeatureClass::FileRead) = 400;
  at(FeatureClass::FileOpen) = 400;
  at(FeatureClass::FileWrite) = 350;
  at(FeatureClass::FileDelete) = 150;
  at(FeatureClass::ExtRead) = 150;
  at(FeatureClass::ExtOpen) = 150;
  at(FeatureClass::ExtWrite) = 150;
  at(FeatureClass::ExtDelete) = 80;
  at(FeatureClass::DirEnumerate) = 120;
  at(FeatureClass::DirCreate) = 100;
  at(FeatureClass::Drop) = 50;
  at(FeatureClass::Str) = 900;
  return config;
}

SynthOutput generate(const SynthConfig& config) {
  validate(config);

  std::array<std::vector<std::string>, kFeatureClassCount> tokens;
  for (int c = 0; c < kFeatureClassCount; ++c)
    tokens[c] = tokens_for_class(static_cast<FeatureClass>(c), config.vocab_sizes[c]);

  // Deal signal roles from the front of each class pool.
  std::array<int, kFeatureClassCount> consumed{};
  std::array<std::vector<int>, kFeatureClassCount> core_ordinal;
  std::array<std::vector<int>, kFeatureClassCount> family_of;
  for (int c = 0; c < kFeatureClassCount; ++c) {
    core_ordinal[c].assign(tokens[c].size(), -1);
    family_of[c].assign(tokens[c].size(), -1);
  }
  auto deal = [&](const std::vector<FeatureClass>& cycle, int count, auto&& mark) {
    int dealt = 0;
    std::size_t at = 0;
    std::size_t stuck = 0;
    while (dealt < count) {
      const int c = static_cast<int>(cycle[at % cycle.size()]);
      ++at;
      if (consumed[c] >= static_cast<int>(tokens[c].size())) {
        if (++stuck >= cycle.size())
          throw InvalidConfig("vocabulary too small for the requested signal features");
        continue;
      }
      stuck = 0;
      mark(c, consumed[c]++, dealt++);
    }
  };

  SynthOutput out;
  out.plantation.mode = config.mode;
  out.plantation.signal_correlation = config.signal_correlation;
  out.plantation.core.resize(static_cast<std::size_t>(config.n_core_signal));
  deal(core_cycle(), config.n_core_signal, [&](int c, int t, int ordinal) {
    core_ordinal[c][t] = ordinal;
    out.plantation.core[static_cast<std::size_t>(ordinal)] =
        feature_name(static_cast<FeatureClass>(c), tokens[c][static_cast<std::size_t>(t)]);
  });
  for (std::size_t f = 0; f < config.families.size(); ++f) {
    auto& planted = out.plantation.family_signal[config.families[f].name];
    deal(family_cycle(), config.n_family_signal, [&](int c, int t, int) {
      family_of[c][t] = static_cast<int>(f);
      planted.push_back(
          feature_name(static_cast<FeatureClass>(c), tokens[c][static_cast<std::size_t>(t)]));
    });
  }

  // Disjoint mode: families own contiguous slices of the core ordinals.
  std::vector<int> core_owner;
  if (config.mode == SynthMode::Disjoint && !config.families.empty()) {
    core_owner.assign(static_cast<std::size_t>(config.n_core_signal), -1);
    const int n_fam = static_cast<int>(config.families.size());
    const int per = config.n_core_signal / n_fam;
    const int rem = config.n_core_signal % n_fam;
    int next = 0;
    for (int f = 0; f < n_fam; ++f) {
      const int take = per + (f < rem ? 1 : 0);
      auto& slice = out.plantation.core_partition[config.families[static_cast<std::size_t>(f)].name];
      for (int i = 0; i < take; ++i, ++next) {
        core_owner[static_cast<std::size_t>(next)] = f;
        slice.push_back(out.plantation.core[static_cast<std::size_t>(next)]);
      }
    }
  }

  const int n_clustered = static_cast<int>(
      std::llround(0.8 * static_cast<double>(config.n_core_signal)));
  const bool correlated = config.signal_correlation > 0.0 && config.mode == SynthMode::SharedCore;

  int total = config.n_goodware;
  for (const auto& family : config.families) total += family.n_samples;
  out.reports.reserve(static_cast<std::size_t>(total));

  std::uint64_t sample_index = 0;
  auto make_sample = [&](bool ransomware, int family_idx, const std::string& sample_id) {
    Rng rng(config.seed, sample_index++);
    BehavioralReport report;
    report.sample_id = sample_id;
    report.label = ransomware ? Label::Ransomware : Label::Goodware;
    if (ransomware) report.family = config.families[static_cast<std::size_t>(family_idx)].name;

    const double p_signal =
        ransomware ? config.signal_present_ransomware : config.signal_present_goodware;
    bool latent = false;
    if (correlated) latent = rng.bernoulli(p_signal);

    for (int c = 0; c < kFeatureClassCount; ++c) {
      const auto cls = static_cast<FeatureClass>(c);
      for (std::size_t t = 0; t < tokens[c].size(); ++t) {
        const int ordinal = core_ordinal[c][t];
        double p = config.background_density;
        if (ordinal >= 0) {
          if (config.mode == SynthMode::SharedCore) {
            p = p_signal;
          } else {
            const bool owned = ransomware && !core_owner.empty() &&
                               core_owner[static_cast<std::size_t>(ordinal)] == family_idx;
            p = owned ? config.signal_present_ransomware : config.signal_present_goodware;
          }
        } else if (family_of[c][t] >= 0) {
          p = (ransomware && family_of[c][t] == family_idx)
                  ? config.signal_present_ransomware
                  : config.signal_present_goodware;
        }
        bool present;
        if (ordinal >= 0 && ordinal < n_clustered && correlated) {
          present = rng.bernoulli(config.signal_correlation) ? latent : rng.bernoulli(p);
        } else {
          present = rng.bernoulli(p);
        }
        if (present) insert_token(report, cls, tokens[c][t]);
      }
    }
    if (report.api_calls.empty())
      report.api_calls.insert(tokens[static_cast<int>(FeatureClass::Api)].back());
    out.reports.push_back(std::move(report));
  };

  for (int i = 0; i < config.n_goodware; ++i) make_sample(false, -1, "good-" + pad(i, 4));
  for (std::size_t f = 0; f < config.families.size(); ++f) {
    const std::string stem = lowercase_id(config.families[f].name);
    for (int i = 0; i < config.families[f].n_samples; ++i)
      make_sample(true, static_cast<int>(f), stem + "-" + pad(i, 3));
  }
  return out;
}

nlohmann::ordered_json plantation_to_json(const Plantation& plantation) {
  nlohmann::ordered_json j;
  j["format"] = "plantation/1";
  j["mode"] = to_string(plantation.mode);
  j["signal_correlation"] = plantation.signal_correlation;
  j["core"] = plantation.core;
  j["family_signal"] = plantation.family_signal;
  if (!plantation.core_partition.empty()) j["core_partition"] = plantation.core_partition;
  return j;
}

Plantation plantation_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "plantation/1")
    throw SchemaError("not a plantation/1 file");
  Plantation p;
  p.mode = synth_mode_from_string(j.at("mode").get<std::string>());
  p.signal_correlation = j.at("signal_correlation").get<double>();
  p.core = j.at("core").get<std::vector<std::string>>();
  p.family_signal =
      j.at("family_signal").get<std::map<std::string, std::vector<std::string>>>();
  if (j.contains("core_partition"))
    p.core_partition =
        j.at("core_partition").get<std::map<std::string, std::vector<std::string>>>();
  return p;
}

void write_corpus(const SynthOutput& output, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
  };
  std::string manifest = "sample_id,label,family\n";
  for (const auto& report : output.reports) {
    write(dir / (report.sample_id + ".trace.json"), serialize_report(report));
    manifest += report.sample_id;
    manifest += ',';
    manifest += to_string(*report.label);
    manifest += ',';
    if (report.family) manifest += *report.family;
    manifest += '\n';
  }
  write(dir / "plantation.json", plantation_to_json(output.plantation).dump(2) + "\n");
  write(dir / "manifest.csv", manifest);
}

}  // namespace tracecls
