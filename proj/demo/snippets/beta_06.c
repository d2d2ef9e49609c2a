int run_06(const int *a, int n) {
    if (n > 0) {
        n--;
    }
    return n;
}
