int run_08(const int *a, int n) {
    if (n > 0) {
        n--;
    }
    for (int i = 0; i < n; i++) {
        if (a[i] < 0 && i > 1) {
            n++;
        }
    }
    do {
        n--;
    } while (n > 9 || n < 0);
    return n;
}
