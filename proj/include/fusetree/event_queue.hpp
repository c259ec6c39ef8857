#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "fusetree/errors.hpp"

namespace fusetree {

// Indexed min-priority queue over adjacent cluster pairs, keyed by candidate
// fusion lambda with the pair's sorted-mean position as tie-break. Exactly one
// slot per pair id; updates overwrite in place (no lazy deletion), so memory
// stays linear in the number of clusters.
class EventQueue {
public:
    struct Key {
        double lambda;
        int position;
        bool operator<(const Key& o) const {
            if (lambda != o.lambda) return lambda < o.lambda;
            return position < o.position;
        }
    };

    explicit EventQueue(int capacity)
        : heap_pos_(capacity, -1) {}

    bool empty() const { return heap_.empty(); }

    bool contains(int id) const { return heap_pos_[id] >= 0; }

    void push_or_update(int id, Key key) {
        if (heap_pos_[id] < 0) {
            heap_pos_[id] = static_cast<int>(heap_.size());
            heap_.push_back({key, id});
            sift_up(heap_pos_[id]);
        } else {
            const int i = heap_pos_[id];
            const Key old = heap_[i].key;
            heap_[i].key = key;
            if (key < old) sift_up(i); else sift_down(i);
        }
    }

    void remove(int id) {
        const int i = heap_pos_[id];
        if (i < 0) return;
        swap_entries(i, static_cast<int>(heap_.size()) - 1);
        heap_.pop_back();
        heap_pos_[id] = -1;
        if (i < static_cast<int>(heap_.size())) {
            sift_up(i);
            sift_down(i);
        }
    }

    std::pair<int, Key> pop_min() {
        if (heap_.empty()) throw InternalError("EventQueue: pop from empty queue");
        const Entry top = heap_[0];
        remove(top.id);
        return {top.id, top.key};
    }

private:
    struct Entry {
        Key key;
        int id;
    };

    void swap_entries(int i, int j) {
        std::swap(heap_[i], heap_[j]);
        heap_pos_[heap_[i].id] = i;
        heap_pos_[heap_[j].id] = j;
    }

    void sift_up(int i) {
        while (i > 0) {
            const int parent = (i - 1) / 2;
            if (!(heap_[i].key < heap_[parent].key)) break;
            swap_entries(i, parent);
            i = parent;
        }
    }

    void sift_down(int i) {
        const int size = static_cast<int>(heap_.size());
        while (true) {
            int smallest = i;
            for (int child : {2 * i + 1, 2 * i + 2})
                if (child < size && heap_[child].key < heap_[smallest].key)
                    smallest = child;
            if (smallest == i) break;
            swap_entries(i, smallest);
            i = smallest;
        }
    }

    std::vector<Entry> heap_;
    std::vector<int> heap_pos_;
};

}  // namespace fusetree
