package p;

class Ok {
    int fine() {
        return 1;
    }
}

class Bad {
    void unfinished( {
        int x = ;
