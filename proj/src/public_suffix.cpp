#include "sentinel/url.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace sentinel {

namespace {

// Snapshot of the public suffix list: generic and country TLDs, common
// second-level registries, and a handful of shared-hosting suffixes.
// Kept sorted for binary search.
constexpr std::array<std::string_view, 399> kSuffixes = {
    "000webhostapp.com", "ab.ca", "ac.ae", "ac.cn", "ac.id", "ac.il", "ac.in", "ac.jp", "ac.kr",
    "ac.nz", "ac.th", "ac.uk", "accountant", "ad.jp", "ae", "aero", "agency", "ai", "am", "app",
    "appspot.com", "ar", "art.br", "asia", "asn.au", "at", "au", "azurewebsites.net", "bc.ca",
    "bd", "be", "bg", "bid", "biz", "biz.pl", "biz.tr", "blog", "blog.br", "blogspot.com",
    "bond", "br", "buzz", "by", "ca", "ca.us", "cam", "cat", "cc", "center", "cf", "ch", "cl",
    "click", "cloud", "cloudfront.net", "club", "cn", "co", "co.ae", "co.id", "co.il", "co.in",
    "co.jp", "co.kr", "co.nz", "co.th", "co.uk", "co.za", "com", "com.ar", "com.au", "com.br",
    "com.cn", "com.eg", "com.es", "com.hk", "com.mx", "com.my", "com.ng", "com.ph", "com.pk",
    "com.pl", "com.pt", "com.ru", "com.sa", "com.sg", "com.tr", "com.tw", "com.ua", "com.vn",
    "company", "coop", "country", "cricket", "cyou", "cz", "date", "de", "dev", "digital", "dk",
    "download", "duckdns.org", "dz", "ed.jp", "edu", "edu.ar", "edu.au", "edu.br", "edu.cn",
    "edu.eg", "edu.es", "edu.hk", "edu.in", "edu.mx", "edu.my", "edu.ng", "edu.ph", "edu.pk",
    "edu.pt", "edu.sa", "edu.sg", "edu.tr", "edu.tw", "edu.vn", "edu.za", "eg", "email", "es",
    "faith", "fi", "firebaseapp.com", "firm.in", "fit", "fl.us", "fm", "fr", "fun", "ga", "gdn",
    "geek.nz", "gen.in", "gg", "github.io", "gitlab.io", "glitch.me", "global", "go.id",
    "go.jp", "go.kr", "go.th", "gob.ar", "gob.es", "gob.mx", "gov", "gov.ae", "gov.au",
    "gov.br", "gov.cn", "gov.eg", "gov.hk", "gov.il", "gov.in", "gov.my", "gov.ng", "gov.ph",
    "gov.pk", "gov.pt", "gov.sa", "gov.sg", "gov.tr", "gov.tw", "gov.ua", "gov.uk", "gov.vn",
    "gov.za", "govt.nz", "gq", "gr", "gr.jp", "group", "help", "herokuapp.com", "hk", "host",
    "hu", "icu", "id", "id.au", "idv.hk", "idv.tw", "il", "im", "in", "in.th", "ind.in", "info",
    "info.pl", "info.tr", "ink", "int", "io", "ir", "is", "it", "jobs", "jp", "ke", "kiev.ua",
    "kim", "kr", "kz", "lg.jp", "life", "link", "live", "lk", "loan", "lol", "ltd.uk", "ly",
    "ma", "me", "me.uk", "men", "mil", "ml", "mobi", "monster", "mov", "msk.ru", "muni.il",
    "museum", "mx", "my", "name", "name.my", "ne.jp", "ne.kr", "net", "net.ae", "net.ar",
    "net.au", "net.br", "net.cn", "net.eg", "net.hk", "net.id", "net.il", "net.in", "net.mx",
    "net.my", "net.ng", "net.nz", "net.ph", "net.pk", "net.pl", "net.ru", "net.sa", "net.sg",
    "net.th", "net.tr", "net.tw", "net.ua", "net.uk", "net.vn", "net.za", "netlify.app",
    "network", "news", "ng", "ngrok.io", "nhs.uk", "nl", "no", "no-ip.org", "nom.es", "np",
    "ny.us", "nz", "on.ca", "one", "online", "or.id", "or.jp", "or.kr", "or.th", "org",
    "org.ae", "org.ar", "org.au", "org.br", "org.cn", "org.eg", "org.es", "org.hk", "org.il",
    "org.in", "org.mx", "org.my", "org.ng", "org.nz", "org.ph", "org.pk", "org.pl", "org.pt",
    "org.ru", "org.sa", "org.sg", "org.tr", "org.tw", "org.ua", "org.uk", "org.vn", "org.za",
    "page", "pages.dev", "party", "pe", "per.sg", "ph", "pk", "pl", "plc.uk", "police.uk",
    "press", "pro", "pt", "qa", "qc.ca", "quest", "racing", "re.kr", "repl.co", "res.in",
    "rest", "review", "ro", "ru", "s3.amazonaws.com", "sa", "sbs", "sch.uk", "school.nz",
    "science", "se", "services", "sg", "shop", "site", "sk", "solutions", "space", "spb.ru",
    "store", "stream", "support", "surf", "systems", "tech", "tel", "th", "tk", "tn", "to",
    "today", "top", "tr", "trade", "travel", "tv", "tw", "tx.us", "ua", "uk", "uno", "us",
    "vercel.app", "vip", "vn", "wa.us", "wang", "waw.pl", "web.app", "web.id", "web.za",
    "webcam", "website", "weebly.com", "win", "wixsite.com", "work", "workers.dev", "world",
    "ws", "xin", "xyz", "za", "zip",
};

}  // namespace

bool is_public_suffix(std::string_view suffix) {
    return std::binary_search(kSuffixes.begin(), kSuffixes.end(), suffix);
}

}  // namespace sentinel
