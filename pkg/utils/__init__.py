# 模型文件读写、报告渲染与绘图
