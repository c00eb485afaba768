# 命令注册与命令函数
