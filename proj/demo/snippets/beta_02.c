int run_02(const int *a, int n) {
    if (n > 0) {
        n--;
    }
    return n;
}
