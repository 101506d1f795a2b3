struct Pt { float x; int tag; };
Pt a;
int main() {
  Pt b;
  b.x = 1.0f; b.tag = 2;
  a = b;
  return a.tag;
}
