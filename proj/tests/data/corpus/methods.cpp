class Counter {
 public:
    explicit Counter(int start) : value_(start) {}
    int bump(int by);

 private:
    int value_;
};

int Counter::bump(int by) {
    if (by > 0) {
        value_ += by;
    }
    return value_;
}
