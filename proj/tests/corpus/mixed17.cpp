class Counter {
  int hits;
  localint local_hits;
public:
  Counter() : hits(0), local_hits(0) {}
  void hit(localint k) { hits = hits + 1; local_hits = local_hits + k; }
};
Counter c;
int main() { localint one; one = 1; c.hit(one); c.hit(one); return 0; }
