bool in_band(int x, int low, int high) {
    if (x >= low and x <= high) {
        return true;
    }
    if (x < 0 or x > 100) {
        return false;
    }
    return x == low or x == high;
}
