// On-disk cache for FnSequence entries. One file per (lambda, sign, n,
// lift) key; writes go to a temp file and are renamed into place so readers
// only ever see complete files. Stale versions are skipped with a warning,
// corrupt files are recomputed.
#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

#include "heightlab/bigint.hpp"
#include "heightlab/per1.hpp"
#include "heightlab/polyforms.hpp"

namespace heightlab {

class FnCache {
  public:
    explicit FnCache(std::string dir) : dir_(std::move(dir)) {}

    bool enabled() const { return !dir_.empty(); }
    const std::string& dir() const { return dir_; }

    using WarnFn = std::function<void(const std::string&)>;

    static std::string header_line(const Lambda& lambda, CriticalSign s, int n, LiftKind lift) {
        std::ostringstream os;
        os << "PER1FN v1 lambda=" << lambda.numerator() << "/" << lambda.denominator()
           << " sign=" << sign_label(s) << " n=" << n << " lift=" << lift_label(lift);
        return os.str();
    }

    std::string path_for(const Lambda& lambda, CriticalSign s, int n, LiftKind lift) const {
        std::ostringstream os;
        os << "per1fn-" << lambda.numerator() << "_" << lambda.denominator() << "-"
           << (s == CriticalSign::plus ? "p" : "m") << "-n" << n << "-"
           << (lift == LiftKind::standard ? "std" : "lit") << ".txt";
        return (std::filesystem::path(dir_) / os.str()).string();
    }

    std::optional<FnEntry> load(const Lambda& lambda, CriticalSign s, int n, LiftKind lift,
                                const WarnFn& warn = {}) const {
        if (!enabled()) return std::nullopt;
        const std::string path = path_for(lambda, s, n, lift);
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::nullopt;
        try {
            std::string header;
            if (!std::getline(in, header)) throw ParseError("empty cache file");
            if (header.rfind("PER1FN v1 ", 0) != 0) {
                if (warn && header.rfind("PER1FN ", 0) == 0)
                    warn("ignoring cache file with unknown version: " + path);
                else if (warn)
                    warn("ignoring unrecognized cache file: " + path);
                return std::nullopt;
            }
            if (header != header_line(lambda, s, n, lift))
                throw ParseError("cache key mismatch");
            FnEntry entry;
            entry.pair = parse_bfp(in);
            entry.degree = entry.pair.degree();
            std::string gline;
            if (!std::getline(in, gline)) throw ParseError("missing gcd header");
            int gdeg = -1;
            {
                std::istringstream gs(gline);
                std::string tag, ver, degtok, conttok;
                gs >> tag >> ver >> degtok >> conttok;
                if (tag != "GN" || ver != "v1" || degtok.rfind("deg=", 0) != 0 ||
                    conttok.rfind("content=", 0) != 0)
                    throw ParseError("bad gcd header");
                gdeg = std::stoi(degtok.substr(4));
                entry.removed_content = Int(conttok.substr(8));
            }
            std::string coeffline;
            if (!std::getline(in, coeffline)) throw ParseError("missing gcd coefficients");
            std::istringstream cs(coeffline);
            std::vector<Int> gc;
            std::string tok;
            while (cs >> tok) gc.emplace_back(tok);
            if (static_cast<int>(gc.size()) != gdeg + 1) throw ParseError("gcd coefficient count");
            entry.removed_gcd = BinaryForm(std::move(gc));
            if (entry.removed_gcd.is_zero() || entry.removed_content < 1)
                throw ParseError("invalid gcd record");
            return entry;
        } catch (const std::exception& e) {
            if (warn) warn(std::string("corrupt cache file ") + path + " (" + e.what() + "); recomputing");
            return std::nullopt;
        }
    }

    void store(const Lambda& lambda, CriticalSign s, int n, LiftKind lift,
               const FnEntry& entry) const {
        if (!enabled()) return;
        std::filesystem::create_directories(dir_);
        const std::string path = path_for(lambda, s, n, lift);
        const std::string tmp = path + ".tmp." + std::to_string(::getpid());
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os) throw Error("cannot open cache temp file " + tmp);
            os << header_line(lambda, s, n, lift) << "\n";
            os << to_bfp(entry.pair);
            os << "GN v1 deg=" << entry.removed_gcd.degree()
               << " content=" << entry.removed_content << "\n";
            for (int k = 0; k <= entry.removed_gcd.degree(); ++k) {
                if (k) os << ' ';
                os << entry.removed_gcd.coeff(k);
            }
            os << "\n";
            if (!os.good()) throw Error("write failure on " + tmp);
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec) {
            std::filesystem::remove(tmp);
            throw Error("atomic rename into cache failed: " + ec.message());
        }
    }

    // Loads the longest consecutive prefix from the cache, extends the
    // sequence symbolically to n_max, and stores any freshly built entries.
    FnSequence load_or_build(const Lambda& lambda, CriticalSign s, int n_max, LiftKind lift,
                             const BuildLimits& limits = {}, const WarnFn& warn = {}) const {
        FnSequence seq(lambda, s, lift);
        int have = 0;
        for (int n = 1; n <= n_max; ++n) {
            auto entry = load(lambda, s, n, lift, warn);
            if (!entry) break;
            seq.append(std::move(*entry));
            have = n;
        }
        if (have < n_max) {
            extend_Fn(seq, n_max, limits);
            for (int n = have + 1; n <= n_max; ++n) store(lambda, s, n, lift, seq.entry(n));
        }
        return seq;
    }

  private:
    std::string dir_;
};

}  // namespace heightlab
