"""Симулятор вектора состояния с безопасным развычислением и алгоритмами поиска."""
