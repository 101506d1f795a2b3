struct P { int id; double w; float v[3]; };
P ps[4];
int main() {
  for (int i = 0; i < 4; i++) { ps[i].id = i; ps[i].w = i * 0.5; ps[i].v[1] = 2.0f; }
  return ps[3].id;
}
