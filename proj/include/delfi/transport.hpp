#pragma once

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <mutex>
#include <string>
#include <vector>

namespace delfi {

// One protocol message. Broadcasts carry machine_id 0 (the coordinator).
struct Message {
    enum class Tag : std::uint8_t {
        GradientUp = 0,
        MultiplierUp = 1,
        GradientBroadcast = 2,
        MultiplierBroadcast = 3,
        StatContribUp = 4,
    };
    Tag tag = Tag::GradientUp;
    std::uint32_t machine_id = 0;
    std::vector<double> payload;

    bool operator==(const Message&) const = default;
};

// Delivery observer. Delivery is reliable and ordered; the protocol invokes
// deliver() once per message in protocol order.
class Transport {
public:
    virtual ~Transport() = default;
    virtual void deliver(const Message& m) = 0;
};

// Default in-process channel set: keeps the full message log in memory.
class ChannelTransport final : public Transport {
public:
    void deliver(const Message& m) override;
    const std::vector<Message>& log() const { return log_; }
    void clear() { log_.clear(); }

private:
    std::vector<Message> log_;
    std::mutex mutex_;
};

// Record/replay file transport. Each message is one length-prefixed binary
// frame: u32 LE byte count of the rest, u8 tag, u32 LE machine id, payload of
// f64 LE values.
class FileRecordTransport final : public Transport {
public:
    explicit FileRecordTransport(const std::string& path);
    void deliver(const Message& m) override;
    void close();

private:
    std::ofstream out_;
    std::mutex mutex_;
};

void write_frame(std::ostream& out, const Message& m);
std::vector<Message> read_frames(std::istream& in);
std::vector<Message> replay_file(const std::string& path);

}  // namespace delfi
