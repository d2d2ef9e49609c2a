function run01(a) {
    return a.length;
}
