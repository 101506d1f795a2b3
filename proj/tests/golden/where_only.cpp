float x;
int main() {
  where (x > 1.0f) x = 1.0f;
  return 0;
}
