union Word { int i; int j; };
union Lane { float f; localint k; double d; };
struct Slot { Word w; Lane l; int tag; };
Slot slots[3];
int main() { slots[2].w.i = 5; slots[2].l.d = 0.25; slots[2].tag = 1; return slots[2].w.j; }
