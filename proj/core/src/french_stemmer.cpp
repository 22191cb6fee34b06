// Copyright 2026 expandir project
// Licensed under the Apache License, Version 2.0

#include "expandir/french_stemmer.hpp"

#include <array>
#include <cstddef>
#include <string>

#include "expandir/unicode.hpp"

namespace expandir {

namespace {

// The algorithm marks some vowels as consonants by uppercasing them during
// the prelude (u->U, i->I, y->Y); the markers are folded back at the end.

constexpr char32_t kAGrave = 0x00E0, kACirc = 0x00E2, kCCedil = 0x00E7;
constexpr char32_t kEGrave = 0x00E8, kEAcute = 0x00E9, kECirc = 0x00EA, kEDiaer = 0x00EB;
constexpr char32_t kICirc = 0x00EE, kIDiaer = 0x00EF, kOCirc = 0x00F4;
constexpr char32_t kUGrave = 0x00F9, kUCirc = 0x00FB;

bool is_vowel(char32_t c) {
    switch (c) {
        case U'a': case U'e': case U'i': case U'o': case U'u': case U'y':
        case kAGrave: case kACirc: case kEGrave: case kEAcute: case kECirc:
        case kEDiaer: case kICirc: case kIDiaer: case kOCirc: case kUGrave:
        case kUCirc:
            return true;
        default:
            return false;
    }
}

// Characters that keep a final 's' from being stripped as a residual suffix.
bool keeps_final_s(char32_t c) {
    return c == U'a' || c == U'i' || c == U'o' || c == U'u' || c == U's' || c == kEGrave;
}

struct Suffix {
    std::u32string_view text;
    int action;
};

// Step 1, standard suffixes.
constexpr std::array<Suffix, 43> kStandard{{
    {U"ance", 1},   {U"iqUe", 1},   {U"isme", 1},   {U"able", 1},  {U"iste", 1},
    {U"eux", 1},    {U"ances", 1},  {U"iqUes", 1},  {U"ismes", 1}, {U"ables", 1},
    {U"istes", 1},  {U"atrice", 2}, {U"ateur", 2},  {U"ation", 2}, {U"atrices", 2},
    {U"ateurs", 2}, {U"ations", 2}, {U"logie", 3},  {U"logies", 3},
    {U"usion", 4},  {U"ution", 4},  {U"usions", 4}, {U"utions", 4},
    {U"ence", 5},   {U"ences", 5},  {U"ement", 6},  {U"ements", 6},
    {U"ité", 7}, {U"ités", 7},
    {U"if", 8},     {U"ive", 8},    {U"ifs", 8},    {U"ives", 8},
    {U"eaux", 9},   {U"aux", 10},   {U"euse", 11},  {U"euses", 11},
    {U"issement", 12}, {U"issements", 12},
    {U"amment", 13}, {U"emment", 14}, {U"ment", 15}, {U"ments", 15},
}};

// Optional endings examined after an 'ement(s)' deletion.
constexpr std::array<Suffix, 6> kAfterEment{{
    {U"iv", 1}, {U"eus", 2}, {U"abl", 3}, {U"iqU", 3},
    {U"ièr", 4}, {U"Ièr", 4},
}};

// Optional endings examined after an 'ite(s)' deletion.
constexpr std::array<Suffix, 3> kAfterIte{{
    {U"abil", 1}, {U"ic", 2}, {U"iv", 3},
}};

// Step 2a, verb suffixes beginning with i.
constexpr std::array<Suffix, 35> kIVerb{{
    {U"îmes", 1}, {U"ît", 1}, {U"îtes", 1},
    {U"i", 1},       {U"ie", 1},      {U"ies", 1},     {U"ir", 1},     {U"ira", 1},
    {U"irai", 1},    {U"iraIent", 1}, {U"irais", 1},   {U"irait", 1},  {U"iras", 1},
    {U"irent", 1},   {U"irez", 1},    {U"iriez", 1},   {U"irions", 1}, {U"irons", 1},
    {U"iront", 1},   {U"is", 1},      {U"issaIent", 1}, {U"issais", 1},
    {U"issait", 1},  {U"issant", 1},  {U"issante", 1}, {U"issantes", 1},
    {U"issants", 1}, {U"isse", 1},    {U"issent", 1},  {U"isses", 1},
    {U"issez", 1},   {U"issiez", 1},  {U"issions", 1}, {U"issons", 1}, {U"it", 1},
}};

// Step 2b, other verb suffixes.
constexpr std::array<Suffix, 38> kVerb{{
    {U"ions", 1},
    {U"é", 2},   {U"ée", 2},  {U"ées", 2}, {U"és", 2},
    {U"èrent", 2}, {U"er", 2},     {U"era", 2},      {U"erai", 2},
    {U"eraIent", 2},  {U"erais", 2},   {U"erait", 2},    {U"eras", 2},
    {U"erez", 2},     {U"eriez", 2},   {U"erions", 2},   {U"erons", 2},
    {U"eront", 2},    {U"ez", 2},      {U"iez", 2},
    {U"âmes", 3}, {U"ât", 3}, {U"âtes", 3},
    {U"a", 3},        {U"ai", 3},      {U"aIent", 3},    {U"ais", 3},  {U"ait", 3},
    {U"ant", 3},      {U"ante", 3},    {U"antes", 3},    {U"ants", 3}, {U"as", 3},
    {U"asse", 3},     {U"assent", 3},  {U"asses", 3},    {U"assiez", 3},
    {U"assions", 3},
}};

// Step 4 residual suffixes.
constexpr std::array<Suffix, 7> kResidual{{
    {U"ion", 1},
    {U"ier", 2}, {U"ière", 2}, {U"Ier", 2}, {U"Ière", 2},
    {U"e", 3},   {U"ë", 4},
}};

constexpr std::array<std::u32string_view, 5> kDoubles{
    U"enn", U"onn", U"ett", U"ell", U"eill"};

class FrenchStemmer {
public:
    explicit FrenchStemmer(std::u32string word) : w_(std::move(word)) {}

    std::u32string run() {
        if (w_.empty()) return w_;
        prelude();
        mark_regions();
        bool suffix_removed = standard_suffix();
        if (!suffix_removed) suffix_removed = i_verb_suffix();
        if (!suffix_removed) suffix_removed = verb_suffix();
        if (suffix_removed) {
            // Undo a trailing consonant marker exposed by the removal.
            if (!w_.empty() && w_.back() == U'Y') w_.back() = U'i';
            else if (!w_.empty() && w_.back() == kCCedil) w_.back() = U'c';
        } else {
            residual_suffix();
        }
        un_double();
        un_accent();
        postlude();
        return w_;
    }

private:
    std::u32string w_;
    std::size_t pv_ = 0, p1_ = 0, p2_ = 0;

    bool in_rv(std::size_t pos) const { return pos >= pv_; }
    bool in_r1(std::size_t pos) const { return pos >= p1_; }
    bool in_r2(std::size_t pos) const { return pos >= p2_; }

    bool ends_with(std::u32string_view s, std::size_t end, std::size_t floor) const {
        if (end < floor + s.size()) return false;
        return w_.compare(end - s.size(), s.size(), s) == 0;
    }

    // Longest suffix of w_[floor..end) among `table`; returns action, or 0.
    template <std::size_t N>
    int longest(const std::array<Suffix, N>& table, std::size_t end, std::size_t floor,
                std::size_t* start) const {
        int action = 0;
        std::size_t best = 0;
        for (const auto& e : table) {
            if (e.text.size() > best && ends_with(e.text, end, floor)) {
                best = e.text.size();
                action = e.action;
            }
        }
        if (action != 0) *start = end - best;
        return action;
    }

    void erase(std::size_t from, std::size_t to) { w_.erase(from, to - from); }
    void replace(std::size_t from, std::size_t to, std::u32string_view s) {
        w_.replace(from, to - from, s.data(), s.size());
    }

    // Mark u/i between vowels, y next to a vowel and u after q as consonants.
    void prelude() {
        std::size_t i = 0;
        while (i < w_.size()) {
            bool fired = false;
            if (is_vowel(w_[i]) && i + 1 < w_.size()) {
                const char32_t c = w_[i + 1];
                if ((c == U'u' || c == U'i') && i + 2 < w_.size() && is_vowel(w_[i + 2])) {
                    w_[i + 1] = (c == U'u') ? U'U' : U'I';
                    fired = true;
                } else if (c == U'y') {
                    w_[i + 1] = U'Y';
                    fired = true;
                }
            }
            if (!fired && w_[i] == U'y' && i + 1 < w_.size() && is_vowel(w_[i + 1])) {
                w_[i] = U'Y';
                fired = true;
            }
            if (!fired && w_[i] == U'q' && i + 1 < w_.size() && w_[i + 1] == U'u') {
                w_[i + 1] = U'U';
                fired = true;
            }
            if (!fired) ++i;
        }
    }

    void mark_regions() {
        const std::size_t n = w_.size();
        pv_ = p1_ = p2_ = n;
        if (n >= 3 && is_vowel(w_[0]) && is_vowel(w_[1])) {
            pv_ = 3;
        } else if (n >= 3 && (w_.compare(0, 3, U"par") == 0 || w_.compare(0, 3, U"col") == 0 ||
                              w_.compare(0, 3, U"tap") == 0)) {
            pv_ = 3;
        } else {
            for (std::size_t i = 1; i < n; ++i) {
                if (is_vowel(w_[i])) {
                    pv_ = i + 1;
                    break;
                }
            }
        }
        std::size_t i = 0;
        while (i < n && !is_vowel(w_[i])) ++i;
        while (i < n && is_vowel(w_[i])) ++i;
        if (i >= n) return;
        p1_ = i + 1;
        i = p1_;
        while (i < n && !is_vowel(w_[i])) ++i;
        while (i < n && is_vowel(w_[i])) ++i;
        if (i >= n) return;
        p2_ = i + 1;
    }

    bool standard_suffix() {
        std::size_t start = 0;
        const int action = longest(kStandard, w_.size(), 0, &start);
        if (action == 0) return false;
        const std::size_t end = w_.size();
        switch (action) {
            case 1:  // ance iqUe isme able iste eux (+plural)
                if (!in_r2(start)) return false;
                erase(start, end);
                return true;
            case 2: {  // atrice ateur ation (+plural)
                if (!in_r2(start)) return false;
                erase(start, end);
                if (ends_with(U"ic", start, 0)) {
                    if (in_r2(start - 2)) erase(start - 2, start);
                    else replace(start - 2, start, U"iqU");
                }
                return true;
            }
            case 3:  // logie(s)
                if (!in_r2(start)) return false;
                replace(start, end, U"log");
                return true;
            case 4:  // usion ution (+plural)
                if (!in_r2(start)) return false;
                replace(start, end, U"u");
                return true;
            case 5:  // ence(s)
                if (!in_r2(start)) return false;
                replace(start, end, U"ent");
                return true;
            case 6: {  // ement(s), with a second look at what it uncovered
                if (!in_rv(start)) return false;
                erase(start, end);
                std::size_t s2 = 0;
                switch (longest(kAfterEment, start, 0, &s2)) {
                    case 1:  // iv, possibly at-iv
                        if (in_r2(s2)) {
                            erase(s2, start);
                            if (ends_with(U"at", s2, 0) && in_r2(s2 - 2)) erase(s2 - 2, s2);
                        }
                        break;
                    case 2:  // eus
                        if (in_r2(s2)) erase(s2, start);
                        else if (in_r1(s2)) replace(s2, start, U"eux");
                        break;
                    case 3:  // abl iqU
                        if (in_r2(s2)) erase(s2, start);
                        break;
                    case 4:  // ièr Ièr
                        if (in_rv(s2)) replace(s2, start, U"i");
                        break;
                    default:
                        break;
                }
                return true;
            }
            case 7: {  // ité(s)
                if (!in_r2(start)) return false;
                erase(start, end);
                std::size_t s2 = 0;
                switch (longest(kAfterIte, start, 0, &s2)) {
                    case 1:  // abil
                        if (in_r2(s2)) erase(s2, start);
                        else replace(s2, start, U"abl");
                        break;
                    case 2:  // ic
                        if (in_r2(s2)) erase(s2, start);
                        else replace(s2, start, U"iqU");
                        break;
                    case 3:  // iv
                        if (in_r2(s2)) erase(s2, start);
                        break;
                    default:
                        break;
                }
                return true;
            }
            case 8: {  // if ive (+plural), possibly (ic)at-if
                if (!in_r2(start)) return false;
                erase(start, end);
                if (ends_with(U"at", start, 0) && in_r2(start - 2)) {
                    erase(start - 2, start);
                    const std::size_t at = start - 2;
                    if (ends_with(U"ic", at, 0)) {
                        if (in_r2(at - 2)) erase(at - 2, at);
                        else replace(at - 2, at, U"iqU");
                    }
                }
                return true;
            }
            case 9:  // eaux
                replace(start, end, U"eau");
                return true;
            case 10:  // aux
                if (!in_r1(start)) return false;
                replace(start, end, U"al");
                return true;
            case 11:  // euse(s)
                if (in_r2(start)) {
                    erase(start, end);
                    return true;
                }
                if (in_r1(start)) {
                    replace(start, end, U"eux");
                    return true;
                }
                return false;
            case 12:  // issement(s), verbal: needs a non-vowel before it
                if (!in_r1(start)) return false;
                if (start == 0 || is_vowel(w_[start - 1])) return false;
                erase(start, end);
                return true;
            case 13:  // amment -> ant, then fall through to the verb steps
                if (!in_rv(start)) return false;
                replace(start, end, U"ant");
                return false;
            case 14:  // emment -> ent, same idea
                if (!in_rv(start)) return false;
                replace(start, end, U"ent");
                return false;
            case 15:  // ment(s) after a vowel in RV, then the verb steps
                if (start == 0 || !is_vowel(w_[start - 1]) || !in_rv(start - 1)) return false;
                erase(start, end);
                return false;
            default:
                return false;
        }
    }

    bool i_verb_suffix() {
        if (w_.size() < pv_) return false;
        std::size_t start = 0;
        if (longest(kIVerb, w_.size(), pv_, &start) == 0) return false;
        // Preceding non-vowel, itself inside RV.
        if (start <= pv_ || is_vowel(w_[start - 1])) return false;
        erase(start, w_.size());
        return true;
    }

    bool verb_suffix() {
        if (w_.size() < pv_) return false;
        std::size_t start = 0;
        const int action = longest(kVerb, w_.size(), pv_, &start);
        if (action == 0) return false;
        switch (action) {
            case 1:  // ions
                if (!in_r2(start)) return false;
                erase(start, w_.size());
                return true;
            case 2:  // é ée ées és èrent er era ... ez iez
                erase(start, w_.size());
                return true;
            case 3:  // âmes ât âtes a ai aIent ... assions, plus optional e
                erase(start, w_.size());
                if (ends_with(U"e", start, pv_)) erase(start - 1, start);
                return true;
            default:
                return false;
        }
    }

    bool residual_suffix() {
        std::size_t end = w_.size();
        if (end >= 1 && w_[end - 1] == U's' && end >= 2 && !keeps_final_s(w_[end - 2])) {
            erase(end - 1, end);
            --end;
        }
        if (end < pv_) return false;
        std::size_t start = 0;
        const int action = longest(kResidual, end, pv_, &start);
        if (action == 0) return false;
        switch (action) {
            case 1:  // ion, after s or t, in R2
                if (!in_r2(start)) return false;
                if (start <= pv_ || (w_[start - 1] != U's' && w_[start - 1] != U't'))
                    return false;
                erase(start, end);
                return true;
            case 2:  // ier ière Ier Ière
                replace(start, end, U"i");
                return true;
            case 3:  // e
                erase(start, end);
                return true;
            case 4:  // ë after gu
                if (!ends_with(U"gu", start, pv_)) return false;
                erase(start, end);
                return true;
            default:
                return false;
        }
    }

    void un_double() {
        bool doubled = false;
        for (const auto& d : kDoubles) {
            if (ends_with(d, w_.size(), 0)) {
                doubled = true;
                break;
            }
        }
        if (doubled && !w_.empty()) w_.pop_back();
    }

    void un_accent() {
        std::size_t i = w_.size();
        while (i > 0 && !is_vowel(w_[i - 1])) --i;
        if (i == w_.size()) return;  // needs at least one trailing non-vowel
        if (i > 0 && (w_[i - 1] == kEAcute || w_[i - 1] == kEGrave)) w_[i - 1] = U'e';
    }

    void postlude() {
        for (auto& c : w_) {
            if (c == U'I') c = U'i';
            else if (c == U'U') c = U'u';
            else if (c == U'Y') c = U'y';
        }
    }
};

}  // namespace

std::string stem_french(std::string_view word) {
    FrenchStemmer stemmer(uni::decode_utf8(word));
    return uni::encode_utf8(stemmer.run());
}

}  // namespace expandir
