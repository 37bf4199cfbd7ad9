#include <doctest.h>

#include "test_util.hpp"

#include <bowlerhat3d/errors.hpp>
#include <bowlerhat3d/volume.hpp>

#include <cstdint>
#include <fstream>
#include <limits>

using bh3d::Dtype;
using bh3d::Volume;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

std::string header_json(int nx, int ny, int nz, const char* dtype, const char* raw) {
    return std::string("{\"dims\":[") + std::to_string(nx) + "," + std::to_string(ny) + "," +
           std::to_string(nz) + "],\"dtype\":\"" + dtype + "\",\"raw\":\"" + raw + "\"}";
}

} // namespace

TEST_CASE("volume construction rejects non-positive dims") {
    CHECK_FAILS_WITH(BadDims, Volume(0, 4, 4));
    CHECK_FAILS_WITH(BadDims, Volume(4, -1, 4));
    CHECK_FAILS_WITH(BadDims, Volume(4, 4, 0));
    Volume v(2, 3, 4, 7.5f);
    CHECK(v.size() == 24);
    CHECK(v.at(1, 2, 3) == 7.5f);
}

TEST_CASE("flat layout is x-fastest") {
    Volume v(3, 2, 2);
    CHECK(v.index(1, 0, 0) == 1);
    CHECK(v.index(0, 1, 0) == 3);
    CHECK(v.index(0, 0, 1) == 6);
    CHECK(v.index(2, 1, 1) == 11);
}

TEST_CASE("f32 round trip is bit exact") {
    TempDir dir;
    Volume v = random_volume(5, 4, 3, 42, -1000.0f, 1000.0f);
    v.data[0] = 0.1f; // not representable exactly in decimal, fine in binary
    bh3d::save_volume(v, dir.file("v.json"), Dtype::F32);
    Volume back = bh3d::load_volume(dir.file("v.json"));
    CHECK(bit_equal(v, back));
}

TEST_CASE("u8 save clamps then rounds half away from zero") {
    TempDir dir;
    Volume v(6, 1, 1);
    v.data = {-5.0f, 0.4f, 127.5f, 128.49f, 255.0f, 300.7f};
    bh3d::save_volume(v, dir.file("v.json"), Dtype::U8);
    Volume back = bh3d::load_volume(dir.file("v.json"));
    CHECK(back.data == std::vector<float>{0.0f, 0.0f, 128.0f, 128.0f, 255.0f, 255.0f});
}

TEST_CASE("u16 round trip preserves integral values") {
    TempDir dir;
    Volume v(4, 1, 1);
    v.data = {0.0f, 1.0f, 40000.0f, 65535.0f};
    bh3d::save_volume(v, dir.file("v.json"), Dtype::U16);
    Volume back = bh3d::load_volume(dir.file("v.json"));
    CHECK(back.data == v.data);
}

TEST_CASE("loader reads raw payload in x-fastest order") {
    TempDir dir;
    write_text(dir.file("v.json"), header_json(2, 2, 1, "u8", "v.raw"));
    write_bytes(dir.file("v.raw"), {10, 20, 30, 40});
    Volume v = bh3d::load_volume(dir.file("v.json"));
    CHECK(v.at(0, 0, 0) == 10.0f);
    CHECK(v.at(1, 0, 0) == 20.0f);
    CHECK(v.at(0, 1, 0) == 30.0f);
    CHECK(v.at(1, 1, 0) == 40.0f);
}

TEST_CASE("loader rejects broken headers") {
    TempDir dir;
    CHECK_FAILS_WITH(BadHeader, bh3d::load_volume(dir.file("absent.json")));

    write_text(dir.file("garbage.json"), "{not json");
    CHECK_FAILS_WITH(BadHeader, bh3d::load_volume(dir.file("garbage.json")));

    write_text(dir.file("nodims.json"), R"({"dtype":"u8","raw":"x.raw"})");
    CHECK_FAILS_WITH(BadHeader, bh3d::load_volume(dir.file("nodims.json")));

    write_text(dir.file("nodtype.json"), R"({"dims":[2,2,2],"raw":"x.raw"})");
    CHECK_FAILS_WITH(BadHeader, bh3d::load_volume(dir.file("nodtype.json")));

    write_text(dir.file("noraw.json"), R"({"dims":[2,2,2],"dtype":"u8"})");
    CHECK_FAILS_WITH(BadHeader, bh3d::load_volume(dir.file("noraw.json")));

    write_text(dir.file("order.json"),
               R"({"dims":[2,2,2],"dtype":"u8","raw":"x.raw","order":"z-fastest"})");
    CHECK_FAILS_WITH(BadHeader, bh3d::load_volume(dir.file("order.json")));

    write_text(dir.file("endian.json"),
               R"({"dims":[2,2,2],"dtype":"u8","raw":"x.raw","endian":"big"})");
    CHECK_FAILS_WITH(BadHeader, bh3d::load_volume(dir.file("endian.json")));
}

TEST_CASE("loader rejects bad dims and dtypes") {
    TempDir dir;
    write_text(dir.file("zero.json"), header_json(0, 2, 2, "u8", "x.raw"));
    CHECK_FAILS_WITH(BadDims, bh3d::load_volume(dir.file("zero.json")));

    write_text(dir.file("neg.json"), header_json(2, -3, 2, "u8", "x.raw"));
    CHECK_FAILS_WITH(BadDims, bh3d::load_volume(dir.file("neg.json")));

    write_text(dir.file("dtype.json"), header_json(2, 2, 2, "f64", "x.raw"));
    CHECK_FAILS_WITH(UnknownDtype, bh3d::load_volume(dir.file("dtype.json")));
}

TEST_CASE("loader rejects missing or mis-sized payloads") {
    TempDir dir;
    write_text(dir.file("v.json"), header_json(2, 2, 1, "u8", "v.raw"));
    CHECK_FAILS_WITH(MissingRaw, bh3d::load_volume(dir.file("v.json")));

    write_bytes(dir.file("v.raw"), {1, 2, 3});
    CHECK_FAILS_WITH(RawTooSmall, bh3d::load_volume(dir.file("v.json")));

    write_bytes(dir.file("v.raw"), {1, 2, 3, 4, 5});
    CHECK_FAILS_WITH(RawTooLarge, bh3d::load_volume(dir.file("v.json")));
}

TEST_CASE("loader rejects non-finite f32 payloads") {
    TempDir dir;
    write_text(dir.file("v.json"), header_json(2, 1, 1, "f32", "v.raw"));
    std::vector<unsigned char> bytes(8, 0);
    const float nan = std::numeric_limits<float>::quiet_NaN();
    std::memcpy(bytes.data() + 4, &nan, 4);
    write_bytes(dir.file("v.raw"), bytes);
    CHECK_FAILS_WITH(NonFiniteData, bh3d::load_volume(dir.file("v.json")));
}

TEST_CASE("save to an unwritable path fails cleanly") {
    Volume v(2, 2, 2, 1.0f);
    CHECK_FAILS_WITH(Unwritable, bh3d::save_volume(v, "/nonexistent_dir_xyz/v.json", Dtype::F32));
}

TEST_CASE("normalize maps onto the unit interval") {
    Volume v = random_volume(8, 8, 8, 7, -50.0f, 150.0f);
    Volume n = bh3d::normalize(v);
    CHECK(bh3d::min_value(n) == 0.0f);
    CHECK(bh3d::max_value(n) == 1.0f);

    SUBCASE("idempotent") {
        Volume nn = bh3d::normalize(n);
        CHECK(bit_equal(n, nn));
    }
    SUBCASE("order preserving") {
        for (std::size_t i = 1; i < v.size(); ++i) {
            if (v.data[i - 1] < v.data[i]) CHECK(n.data[i - 1] <= n.data[i]);
            if (v.data[i - 1] > v.data[i]) CHECK(n.data[i - 1] >= n.data[i]);
        }
    }
}

TEST_CASE("normalize sends constant volumes to zero") {
    Volume v(4, 4, 4, 123.0f);
    Volume n = bh3d::normalize(v);
    CHECK(bh3d::max_value(n) == 0.0f);
    CHECK(bh3d::min_value(n) == 0.0f);
}

TEST_CASE("min and max scan the whole volume") {
    Volume v(3, 3, 3, 5.0f);
    v.at(2, 2, 2) = -1.0f;
    v.at(0, 1, 2) = 9.0f;
    CHECK(bh3d::min_value(v) == -1.0f);
    CHECK(bh3d::max_value(v) == 9.0f);
}
