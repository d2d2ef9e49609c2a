function run05(a) {
    return a.length;
}
