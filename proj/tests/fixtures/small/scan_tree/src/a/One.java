package p;

class One {
    int v() {
        return 1;
    }
}
