union U { float f; localint k; };
union C { int a; int b; };
struct S { U u; C c; double d; };
S s;
int main() { s.u.f = 2.5f; s.c.b = 7; s.d = 1.0; return s.c.a; }
