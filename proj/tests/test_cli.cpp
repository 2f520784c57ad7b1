#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "vwgen/cli.hpp"
#include "vwgen/notation.hpp"

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run vwgen(std::vector<std::string> args) {
    args.insert(args.begin(), "vwgen");
    std::ostringstream out, err;
    int code = vw::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string corpus(const char* name) { return oracle::corpus_path(name); }

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("vwgen-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("generate anbncn with three words") {
    auto r = vwgen({"generate", corpus("anbncn.vw"), "--max-words", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "abc\naabbcc\naaabbbccc\n");
}

TEST_CASE("check reports ambiguity with exit 1") {
    auto r = vwgen({"check", corpus("ambiguous.vw")});
    CHECK(r.code == 1);
    CHECK(r.err.find("AmbiguousHypernotion") != std::string::npos);
    CHECK(r.err.find("ambiguous.vw:6:") != std::string::npos);
}

TEST_CASE("check accepts valid grammars") {
    auto r = vwgen({"check", corpus("anbncn.vw")});
    CHECK(r.code == 0);
    CHECK(r.out.find("2 metarules, 3 hyperrules") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(vwgen({}).code == 2);
    CHECK(vwgen({"frobnicate"}).code == 2);
    CHECK(vwgen({"generate"}).code == 2);
    CHECK(vwgen({"generate", corpus("anbncn.vw"), "--mode", "sideways"}).code == 2);
    CHECK(vwgen({"generate", corpus("anbncn.vw"), "--max-words", "0"}).code == 2);
    CHECK(vwgen({"check", corpus("no-such-file.vw")}).code == 2);
    CHECK(vwgen({"generate", corpus("no-such-file.vw")}).code == 2);
    CHECK(vwgen({"meta", corpus("anbncn.vw"), "Q"}).code == 2);
    auto help = vwgen({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("generate") != std::string::npos);
}

TEST_CASE("fixed-seed random transform is byte-identical") {
    const std::vector<std::string> args{"transform", corpus("toyisa.vw"), "--input", "mov eax , 0",
                                        "--mode",    "random",           "--seed",  "42"};
    auto a = vwgen(args);
    auto b = vwgen(args);
    CHECK(a.code == 0);
    CHECK_FALSE(a.out.empty());
    CHECK(a.out == b.out);
    CHECK(a.err == b.err);
}

TEST_CASE("meta queries") {
    auto r = vwgen({"meta", corpus("anbncn.vw"), "N", "--max-len", "3"});
    CHECK(r.code == 0);
    CHECK(r.out == "N infinite\ni\nii\niii\nexhausted: no\n");
    CHECK(vwgen({"meta", corpus("anbncn.vw"), "A", "--contains", "b"}).out == "yes\n");
    CHECK(vwgen({"meta", corpus("anbncn.vw"), "N", "--contains", ""}).out == "no\n");
    auto j = vwgen({"meta", corpus("anbncn.vw"), "A", "--json"});
    CHECK(j.out == "{\"exhausted\":true,\"finite\":true,\"metanotion\":\"A\",\"produced\":[\"a\",\"b\",\"c\"]}\n");
}

TEST_CASE("match prints bindings") {
    auto r = vwgen({"match", corpus("anbncn.vw"), "--input", "aii"});
    CHECK(r.code == 0);
    CHECK(r.out.find("A=a N=i") != std::string::npos);
    auto j = vwgen({"match", corpus("anbncn.vw"), "--input", "aii", "--json"});
    CHECK(j.out.find("\"binding\":{\"A\":\"a\",\"N\":\"i\"}") != std::string::npos);
    CHECK(vwgen({"match", corpus("anbncn.vw"), "--input", "abc"}).out.find("no hyperrule") != std::string::npos);
}

TEST_CASE("json words") {
    auto r = vwgen({"generate", corpus("anbncn.vw"), "--max-words", "1", "--json"});
    CHECK(r.out.find("\"text\":\"abc\"") != std::string::npos);
    CHECK(r.out.find("\"notions\":[\"a\",\"b\",\"c\"]") != std::string::npos);
}

TEST_CASE("transform without a derivation") {
    auto r = vwgen({"transform", corpus("toyisa.vw"), "--input", "dec edx"});
    CHECK(r.code == 1);
    CHECK(r.err.find("NoDerivation") != std::string::npos);
    CHECK(r.out.empty());
    auto echo = vwgen({"transform", corpus("toyisa.vw"), "--input", "dec edx", "--echo-fixpoint"});
    CHECK(echo.code == 0);
    CHECK(echo.out == "decedx\n");
}

TEST_CASE("traces are line records") {
    auto dir = scratch_dir("trace");
    auto path = (dir / "trace.txt").string();
    auto r = vwgen({"generate", corpus("anbncn.vw"), "--max-words", "1", "--trace", path});
    CHECK(r.code == 0);
    auto text = vw::read_text_file(path);
    CHECK(text == "word 0 step 0 rule 0 notion 0 alt 0 N=i\n"
                  "word 0 step 1 rule 2 notion 0 alt 0 A=a\n"
                  "word 0 step 2 rule - notion 0 alt 0\n"
                  "word 0 step 3 rule 2 notion 1 alt 0 A=b\n"
                  "word 0 step 4 rule - notion 1 alt 0\n"
                  "word 0 step 5 rule 2 notion 2 alt 0 A=c\n"
                  "word 0 step 6 rule - notion 2 alt 0\n");
}

TEST_CASE("split writes one file per part") {
    auto dir = scratch_dir("split");
    auto r = vwgen({"split", corpus("kary3.vw"), "--out", dir.string(), "--free-meta-len", "3"});
    CHECK(r.code == 0);
    CHECK(vw::read_text_file((dir / "part1.txt").string()) == "<x>\n<y>\n<z>\n<xx>\n<yy>\n<zz>\n");
    CHECK(vw::read_text_file((dir / "part3.txt").string()) == "[x]\n[y]\n[z]\n[xx]\n[yy]\n[zz]\n");
    CHECK(vw::read_text_file((dir / "shared.txt").string()) ==
          "INFOS=xi\nINFOS=yi\nINFOS=zi\nINFOS=xii\nINFOS=yii\nINFOS=zii\n");
}

TEST_CASE("audit outcomes") {
    auto ok = vwgen({"audit", corpus("toyisa.vw"), "--input", "mov eax , 0", "--max-depth", "4"});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("FAIL") == std::string::npos);
    CHECK(ok.out.find("0 failed, 0 unparseable") != std::string::npos);

    auto broken = vwgen({"audit", corpus("toyisa-broken.vw"), "--input", "xor [ ebx ] , eax"});
    CHECK(broken.code == 1);
    CHECK(broken.out.find("FAIL") != std::string::npos);

    auto none = vwgen({"audit", corpus("toyisa.vw"), "--input", "dec edx"});
    CHECK(none.code == 0);
    CHECK(none.out.rfind("0 variants", 0) == 0);

    auto with_key = vwgen({"audit", corpus("cf-8.vw"), "--input", "mov eax , key", "--const", "key=7"});
    CHECK(with_key.code == 0);
    CHECK(with_key.out.rfind("0 variants", 0) == 0);

    auto bad_original = vwgen({"audit", corpus("toyisa.vw"), "--input", "mov eax , key"});
    CHECK(bad_original.code == 1);
    CHECK(bad_original.err.find("BadInstruction") != std::string::npos);
}

TEST_CASE("audit with a probe file") {
    auto dir = scratch_dir("probes");
    auto path = (dir / "probes.txt").string();
    std::ofstream(path) << "eax=1\nebx=0x2000\n[0x2000]=5\n\neax=9\nebx=0x3000\n";
    auto r = vwgen({"audit", corpus("toyisa.vw"), "--input", "xor [ ebx ] , eax", "--probes", path});
    CHECK(r.code == 0);
    CHECK(r.out.find("2 variants: 2 passed") != std::string::npos);
}

TEST_CASE("exit codes over the corpus") {
    for (const char* name : {"anbncn.vw", "anbncn-finite.vw", "infinite-alphabet.vw", "cf-8.vw", "cf-216.vw",
                             "kary3.vw", "toyisa.vw", "toyisa-broken.vw"})
        CHECK(vwgen({"check", corpus(name)}).code == 0);
    CHECK(vwgen({"check", corpus("ambiguous.vw")}).code == 1);
}
