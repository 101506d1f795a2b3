struct V { float x; float y; int w; };
float dot(V* a, V* b) { return a->x * b->x + a->y * b->y; }
V p, q;
float r;
int main() { p.x = 1.0f; p.y = 2.0f; q.x = 3.0f; q.y = 4.0f; r = dot(&p, &q); return 0; }
