#include "delfi/transport.hpp"

#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "delfi/errors.hpp"

namespace delfi {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
    v = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
        (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    return true;
}

void put_f64(std::ostream& out, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8))
        throw InvalidConfig("truncated message frame payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
}

}  // namespace

void ChannelTransport::deliver(const Message& m) {
    std::lock_guard<std::mutex> lock(mutex_);
    log_.push_back(m);
}

FileRecordTransport::FileRecordTransport(const std::string& path)
    : out_(path, std::ios::binary) {
    if (!out_) throw InvalidConfig("cannot open transport record file: " + path);
}

void FileRecordTransport::deliver(const Message& m) {
    std::lock_guard<std::mutex> lock(mutex_);
    write_frame(out_, m);
}

void FileRecordTransport::close() {
    std::lock_guard<std::mutex> lock(mutex_);
    out_.close();
}

void write_frame(std::ostream& out, const Message& m) {
    const std::uint32_t body = 1 + 4 + 8 * static_cast<std::uint32_t>(m.payload.size());
    put_u32(out, body);
    const unsigned char tag = static_cast<unsigned char>(m.tag);
    out.write(reinterpret_cast<const char*>(&tag), 1);
    put_u32(out, m.machine_id);
    for (double x : m.payload) put_f64(out, x);
}

std::vector<Message> read_frames(std::istream& in) {
    std::vector<Message> out;
    std::uint32_t body;
    while (get_u32(in, body)) {
        if (body < 5 || (body - 5) % 8 != 0)
            throw InvalidConfig("malformed message frame length " + std::to_string(body));
        Message m;
        unsigned char tag;
        if (!in.read(reinterpret_cast<char*>(&tag), 1))
            throw InvalidConfig("truncated message frame");
        if (tag > 4) throw InvalidConfig("unknown message tag " + std::to_string(tag));
        m.tag = static_cast<Message::Tag>(tag);
        if (!get_u32(in, m.machine_id)) throw InvalidConfig("truncated message frame");
        const std::uint32_t count = (body - 5) / 8;
        m.payload.resize(count);
        for (std::uint32_t i = 0; i < count; ++i) m.payload[i] = get_f64(in);
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<Message> replay_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot open transport record file: " + path);
    return read_frames(in);
}

}  // namespace delfi
