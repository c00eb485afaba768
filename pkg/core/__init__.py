# 核心模块：域运算、概率模型、Popper 表与表示定理
